#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "loglattice/char_class.hpp"
#include "loglattice/connection.hpp"

namespace loglattice::cli {

struct CriterionResult {
    int id = 0;
    std::string title;
    bool pass = false;
    std::string detail;
    double seconds = 0;
};

struct AcceptanceOptions {
    /// Draws the random block catalog and permutes evaluation order.
    std::uint64_t seed = 1;
    /// Half width of the default window, per variable.
    int half_width = 12;
    /// Extra enlargement rounds.
    int window_grow = 0;
};

struct NamedFormal {
    std::string name;
    FormalConnection connection;
};
struct NamedCurve {
    std::string name;
    CurveConnection connection;
};

/// Formal local catalog, one and two variables.
std::vector<NamedFormal> formal_catalog();
/// Curve catalog on P¹ with D ⊆ {0, ∞}.
std::vector<NamedCurve> curve_catalog();
/// Random good blocks: poles in {1,2,3}^ℓ, ℓ ≤ 2, residues in {0, 1/3, 1/2}, regular rank ≤ 2.
std::vector<NamedFormal> random_catalog(std::uint64_t seed, std::size_t count);

/// The nine criteria in order; a criterion that throws is reported failed with the message.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& o);

}  // namespace loglattice::cli
