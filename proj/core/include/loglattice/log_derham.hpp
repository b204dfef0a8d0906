#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "loglattice/finite_complex.hpp"
#include "loglattice/geometry.hpp"
#include "loglattice/lattice_tower.hpp"
#include "loglattice/weight_window.hpp"

namespace loglattice {

/// Membership of a basis vector (degree, label) in one filtration level.
using LevelPredicate = std::function<bool(int, const BasisLabel&)>;

/// A finite complex with named filtrations ("F", "sigma", ...), each level a subcomplex.
struct FilteredComplex {
    FiniteComplex base;
    WeightWindow window;
    std::map<std::string, std::map<int, LevelPredicate>> filtrations;

    /// Level p of filtration `name`, as a complex (quotient of base by nothing).
    FiniteComplex level(const std::string& name, int p) const;
    /// Quotient of two levels: increasing filtrations use level p / level p-1,
    /// decreasing ones level p / level p+1.
    FiniteComplex graded(const std::string& name, int p, bool increasing) const;
};

/// Degree k: ⊕_{|S|=k} (dx_S/x_S) ⊗ E_{q0+k}(Δ). Block b keeps exponents between its lattice
/// floor and hi - k·I_φ; the part above that cut is a subcomplex and is divided out.
/// Attaches F_q (q = 0..q0) and sigma^{≥p}. Throws WindowOverflow if a lattice floor is
/// below the window and InvalidArgument if the tower has depth < n_vars.
FilteredComplex build_log_complex(const LatticeTower& t, const TwistDivisor& delta, const WeightWindow& w,
                                  int q0 = 0);

/// gr^F_q of DR_log V⁰E(Δ) = F_q / F_{q-1}; q = 0 gives the E_0-level complex.
FiniteComplex graded_F_piece(const LatticeTower& t, const TwistDivisor& delta, const WeightWindow& w, int q);

/// Same window grown by 2 and by 4.
std::vector<WeightWindow> stabilization_windows(const WeightWindow& w);
/// Grows w downward until it reaches `need_lo`, keeping a margin of one.
WeightWindow covering_window(const WeightWindow& w, const Exponent& need_lo);

/// Cohomology on w, w+2 and w+4.
struct StabilizedCohomology {
    std::vector<WeightWindow> windows;
    std::vector<DimensionMap> dims;
    bool stable() const;
    const DimensionMap& value() const { return dims.front(); }
};
StabilizedCohomology stabilized(const std::function<DimensionMap(const WeightWindow&)>& f, const WeightWindow& w);

struct CheckEntry {
    std::string label;
    DimensionMap dims;
    bool stable = true;
    bool pass = true;
    std::string detail;
};

struct CheckReport {
    std::string name;
    std::vector<CheckEntry> entries;
    bool pass() const;
    std::string failures() const;
};

/// gr^F_q acyclic for q = 1..q_max on three windows.
CheckReport check_alpha(const LatticeTower& t, const TwistDivisor& delta, const WeightWindow& w, int q_max = 3);

/// How the lower end of each block is placed in the box complexes below.
enum class LowerEnd {
    Localized,  // j_*E: every direction has Laurent behaviour, floor tied to the window
    V0          // V⁰E(Δ): irregular directions as for j_*E, the others at -δ
};
/// De Rham complex of j_*E (LowerEnd::Localized) or logarithmic de Rham complex of
/// V⁰E(Δ) (LowerEnd::V0) on the window. Degree k of block b keeps α in
/// [L - k·m, hi - k·m] in irregular directions (L = lo + n·m).
FiniteComplex build_box_complex(const FormalConnection& c, const TwistDivisor& delta, const WeightWindow& w,
                                LowerEnd mode);

/// Decreasing pole order filtration of j_*E for n = 1: P⁰ = V⁰E(D+Δ), P^{-k} = P^{-k+1} + ∂P^{-k+1}.
struct PoleFiltration {
    WeightWindow window;
    int k_max = 0;
    /// floors[b][k] is the lowest exponent of P^{-k} in block b; entry 0 is P⁰.
    std::vector<std::vector<int>> floors;
    /// Lowest exponent of V⁰E(Δ) per block.
    std::vector<int> v0_floor;

    /// Σ_b rank·dim(P^{-k-1}/P^{-k}) for 0 ≤ k < k_max. Levels P^p with p ≥ 1 are zero.
    long length(int k) const;
    std::vector<std::size_t> ranks;
};
PoleFiltration pole_filtration(const FormalConnection& c, const TwistDivisor& delta, const WeightWindow& w,
                               int k_max = 3);

/// Pole orders of F_kD·E_0(D) for n = 1, one entry per block, from ∂ applied to generators.
/// This is the lattice-level pole growth (2 for x^{-1}, 1 for a regular block).
std::vector<int> lattice_pole_raise(const FormalConnection& c, const WeightWindow& w, int k);

/// gr_σ^p DR_log V⁰E(Δ) → gr_P^p DR(j_*E) is a quasi-isomorphism for p = 1, 0, -1, ..., -k_max (n = 1).
CheckReport check_filtered_qis_P_sigma(const FormalConnection& c, const TwistDivisor& delta, const WeightWindow& w,
                                       int k_max = 3);

/// H(DR_log V⁰E(Δ)) = H(DR j_*E) on three windows; for n = 1 also runs the P/σ comparison.
CheckReport check_beta(const FormalConnection& c, const TwistDivisor& delta, const WeightWindow& w);

}  // namespace loglattice
