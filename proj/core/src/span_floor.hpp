#pragma once

#include <functional>
#include <string>
#include <vector>

#include "loglattice/connection.hpp"
#include "loglattice/weight_window.hpp"

namespace loglattice::detail {

using Operator = std::function<std::vector<ElementaryModel::Term>(const Exponent&, std::size_t)>;

/// Pole order of the lattice spanned by x^{-shift}O ⊗ (fibres) and its images under ops,
/// read off the window. `margin` is how far below the window top the images are complete.
Exponent saturate_floor(std::size_t rank, const Exponent& shift, const WeightWindow& w, bool clip,
                        const std::vector<Operator>& ops, const Exponent& margin, const std::string& what);

}  // namespace loglattice::detail
