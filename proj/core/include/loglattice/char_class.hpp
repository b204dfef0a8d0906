#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "loglattice/connection.hpp"
#include "loglattice/geometry.hpp"
#include "loglattice/log_derham.hpp"
#include "loglattice/weight_window.hpp"

namespace loglattice {

/// Pole orders of one rank one lattice at 0 and ∞ (negative means a zero),
/// in the frame e of the curve connection.
using PoleData = CechLineBundle;

/// Good model E_0 ⊂ ... ⊂ E_depth of a direct sum of rank one connections on P¹.
struct GlobalTower {
    CurveConnection connection;
    int depth = 0;
    /// levels[i][s]: level i of summand s.
    std::vector<std::vector<PoleData>> levels;

    /// Level i of summand s twisted by delta (one multiplicity per boundary point).
    PoleData level(int i, std::size_t s, const TwistDivisor& delta = {}) const;
    /// Σ over summands of the degrees.
    long degree(int i) const;
};

/// Local shift at each boundary point from the local formal tower, plus the residue twist.
GlobalTower global_tower(const CurveConnection& c, int depth);

struct Hypercohomology {
    long h0 = 0;
    long h1 = 0;
    long h2 = 0;
    long chi() const { return h0 - h1 + h2; }
    bool operator==(const Hypercohomology&) const = default;
};

/// H* of E_0(Δ) → Ω¹(log D) ⊗ E_1(Δ) from the long exact sequence of the two line
/// bundles and the maps ∇ induces on H⁰ and on Čech H¹.
Hypercohomology hypercohomology(const GlobalTower& t, const TwistDivisor& delta);

/// Kernel and cokernel of ∇ on the coordinate ring of U = P¹ ∖ D, summed over the
/// summands. Three nested windows [-N, N], N = w.hi, must agree; otherwise throws Error.
Hypercohomology de_rham_oracle_U(const CurveConnection& c, const WeightWindow& w);

/// -[ω⁻¹ ⊗ E_0] + [ω⁻¹ ⊗ Ω¹(log D) ⊗ E_1]
K0Class rhs_k_class(const GlobalTower& t);

/// F_p = Σ_{j+k≤p} F_jD·E_k(D), as pole orders per summand.
struct CoherentFiltration {
    /// pieces[p][s]
    std::vector<std::vector<PoleData>> pieces;
    /// pieces in the model frame of each boundary point, same indexing (entries at
    /// points outside D are zero).
    std::vector<std::vector<PoleData>> model;
    /// deg F_{p+1} - deg F_p once constant.
    long slope = 0;
    long degree(int p) const;
};

/// Pole orders found by saturating with ∂ in the local coordinate at each point.
/// Throws Error when the degree growth is not constant over the last three steps.
CoherentFiltration coherent_filtration(const CurveConnection& c, const GlobalTower& t, int p_max);

/// gr_p of F_pM → Ω¹ ⊗ F_{p+1}M at every boundary point is an isomorphism (p ≥ 1).
bool gr_dr_acyclic(const CurveConnection& c, const CoherentFiltration& f, int p);

struct P0Detection {
    int p0 = -1;
    int cap = 0;
    /// gr_{p0+1} and gr_{p0+2} both acyclic.
    bool found() const { return p0 >= 0; }
};
/// Smallest p0 with gr_{p0+1}, gr_{p0+2} acyclic; cap is 2 + max pole order × rank.
P0Detection detect_p0(const CurveConnection& c, const CoherentFiltration& f);

/// -[ω⁻¹ ⊗ F_{p0}] + [F_{p0+1}]. Throws Error when p0 is not found below the cap.
K0Class lhs_k_class(const CurveConnection& c, const GlobalTower& t);

/// Spencer complex of N = ω ⊗ M against DR(M)[1] for the algebraic model of a one variable
/// formal connection on G_m: full cohomology on three windows, and gr_p for p = 1..p_max with
/// the filtration F_p = Σ_{j+k≤p} F_jD·E_k(D) at 0.
/// dims per entry: {-1, 0} from Sp(N), {1, 2} from DR(M) in degrees 0, 1.
CheckReport spencer_side_change_check(const FormalConnection& c, const WeightWindow& w, int p_max = 3);

}  // namespace loglattice
