#pragma once

#include <cstddef>
#include <vector>

#include "loglattice/connection.hpp"
#include "loglattice/sparse_matrix.hpp"
#include "loglattice/weight_window.hpp"

namespace loglattice {

/// Exponent range [lo, hi] of a one-variable rank-r block; basis x^a e_j, indexed (a - lo)·r + j.
struct Range1 {
    int lo = 0;
    int hi = -1;

    bool empty() const { return hi < lo; }
    std::size_t count() const { return empty() ? 0 : static_cast<std::size_t>(hi - lo + 1); }
    bool contains(int a) const { return a >= lo && a <= hi; }
    bool operator==(const Range1&) const = default;
};

/// ∂_x(x^a e_j) = x^{-1}∇_{x∂_x}(x^a e_j) for a one-variable block.
std::vector<ElementaryModel::Term> partial(const ElementaryModel& blk, int a, std::size_t fiber);

/// Matrix of an operator from span{x^a e_j : a ∈ src} to span{x^a e_j : a ∈ dst}.
/// Terms landing outside dst are dropped; sign multiplies every entry.
/// use_partial selects ∂_x, otherwise x∂_x.
SparseMatrixQ one_variable_matrix(const ElementaryModel& blk, Range1 src, Range1 dst, bool use_partial,
                                  const Rational& sign = Rational(1));

/// Rows of the quotient span{dst} / span{sub}: drops the sub rows of a dst-indexed matrix.
SparseMatrixQ drop_rows_in(const SparseMatrixQ& m, const ElementaryModel& blk, Range1 dst, Range1 sub);

/// Pole order after one saturation x^{-s}O + ∂_x(x^{-s}O) on the window, computed from the
/// span of generators. With clip, terms below the window floor are discarded.
/// Throws WindowOverflow (clip = false) and Error when the span is not monomial.
int derivation_step(const ElementaryModel& blk, int shift, const WeightWindow& w, bool clip);

}  // namespace loglattice
