#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "loglattice/connection.hpp"
#include "loglattice/finite_complex.hpp"
#include "loglattice/geometry.hpp"
#include "loglattice/lattice_tower.hpp"
#include "loglattice/log_derham.hpp"
#include "loglattice/sparse_matrix.hpp"
#include "loglattice/weight_window.hpp"

namespace loglattice {

enum class ReesFlavor { Log, Full };

/// Graded ring generated over k[z] by coordinates and z-scaled (log) derivations.
/// Log flavor: θ_i = z·x_i∂_i for i < ell and θ_j = z·∂_j for j ≥ ell.
struct ReesRingSpec {
    std::size_t n_vars = 0;
    std::size_t ell = 0;
    ReesFlavor flavor = ReesFlavor::Log;

    bool is_log_direction(std::size_t i) const { return flavor == ReesFlavor::Log && i < ell; }
    /// "z", "x1".., "theta1"..
    std::vector<std::string> generators() const;
};

/// Right graded module over the log Rees ring, presented on a window.
/// Degree q in [p_lo, p_hi] has a monomial basis; matrices act on column vectors:
/// z[q] and theta[i][q] map degree q to q+1, x[i][q] maps degree q to itself.
/// Products that leave the window are dropped, so identities hold on the interior only.
struct GradedReesModule {
    ReesRingSpec ring;
    WeightWindow window;
    int p_lo = 0;
    int p_hi = 0;
    std::vector<std::vector<BasisLabel>> basis;
    std::vector<SparseMatrixQ> z;
    std::vector<std::vector<SparseMatrixQ>> x;
    std::vector<std::vector<SparseMatrixQ>> theta;
    /// Per block, how far any theta may lower an exponent.
    std::vector<Exponent> lowering;

    std::size_t n_vars() const { return ring.n_vars; }
    std::size_t dim(int q) const { return basis.at(static_cast<std::size_t>(q - p_lo)).size(); }
    const std::vector<BasisLabel>& basis_of(int q) const { return basis.at(static_cast<std::size_t>(q - p_lo)); }
    const SparseMatrixQ& z_of(int q) const { return z.at(static_cast<std::size_t>(q - p_lo)); }
    const SparseMatrixQ& x_of(std::size_t i, int q) const { return x.at(i).at(static_cast<std::size_t>(q - p_lo)); }
    const SparseMatrixQ& theta_of(std::size_t i, int q) const {
        return theta.at(i).at(static_cast<std::size_t>(q - p_lo));
    }
    long index_of(int q, const BasisLabel& l) const;
    /// Shapes and Rees relations on interior columns.
    bool satisfies_relations() const;
};

using ReesBuilder = std::function<GradedReesModule(const WeightWindow&)>;

/// Degree p piece is E_p(delta) of every block, z the inclusion E_p ⊆ E_{p+1}.
/// The right action is that of ω_X ⊗ E: n·θ_i = -z(∇_{x_i∂_i} + 1)n.
/// Throws WindowOverflow when some E_p has poles below the window.
GradedReesModule rees_of_tower(const LatticeTower& t, const TwistDivisor& delta, const WeightWindow& w,
                               int p_max);

/// rees_of_tower on the smallest enlargement of each window that holds E_{p_max}(delta).
ReesBuilder tower_rees_builder(const LatticeTower& t, const TwistDivisor& delta, int p_max);

/// O[z] with trivial connection; the first `ell` coordinates are boundary directions.
GradedReesModule trivial_rees_module(std::size_t n_vars, std::size_t ell, const WeightWindow& w, int p_max);

/// k[z]/z^layers in degrees 0..layers-1 (degree `layers` present and zero), n = 1,
/// spanned by x^0 with x and theta acting by zero.
GradedReesModule z_torsion_control(int layers);

/// rees_of_tower output plus a summand O/x_1O at every degree (x_1 acts by zero on it).
GradedReesModule with_x1_torsion(GradedReesModule m);

struct TorsionReport {
    /// dim ker z on the interior of degree q.
    std::vector<std::size_t> kernel;
    /// Largest l with ker z^l ≠ ker z^{l-1} in some degree.
    int length = 0;
    /// The longest possible z-power inside the degree range still found new torsion.
    bool cap_binds = false;
    bool strict() const;
};

TorsionReport strictness_check(const GradedReesModule& m);

/// (x_i)_{i ∈ I} in the given order is a regular sequence on every degree piece.
bool regular_sequence_check(const GradedReesModule& m, const std::vector<std::size_t>& I);
/// Same for every subset of {0..ell-1} and every ordering.
bool all_subsets_regular(const GradedReesModule& m);
/// Ñ / Σ_{i∈I} Ñ x_i has no z-torsion on the interior.
bool quotient_strict(const GradedReesModule& m, const std::vector<std::size_t>& I);

/// (Ñ ⊗ ∧Θ̃(log D)) ⊗ D̃ in total z-degree p with δ_triv, degrees -n..0.
/// Labels: alpha/block/fiber from Ñ, frame = S, ops = a (power of ∂̃), level = q.
/// Exponents above a degree dependent cut are divided out (that part is a subcomplex).
struct KoszulComplex {
    FiniteComplex complex;
    int degree = 0;
    std::function<bool(int, const BasisLabel&)> in_band;
};
KoszulComplex koszul_tensor_complex(const GradedReesModule& m, int p);

/// Interior cohomology of the Koszul complex in z-degree p.
DimensionMap koszul_cohomology(const GradedReesModule& m, int p);

/// Koszul complex on Ñ_q ⊗ k[ξ] in ξ-degree r with arrows x_i ⊗ ξ_i, degrees -n..0.
/// The band is every weight piece (α - a in log directions) lying inside the window,
/// so band cohomology is exact.
KoszulComplex gr_koszul_complex(const GradedReesModule& m, int q, int r);
/// dim ker(z: H⁰ gr(q, r) → H⁰ gr(q+1, r)) on the band.
std::size_t gr_h0_z_kernel(const GradedReesModule& m, int q, int r);
CheckReport gr_koszul_acyclicity(const ReesBuilder& build, const WeightWindow& w, int r_max = 2);

/// Strictness, regular sequences for every subset, vanishing negative Koszul cohomology,
/// gr-Koszul degree-zero concentration, each on three windows. Strict gr H⁰ is
/// required only when every quotient Ñ / Σ_I Ñ x_i is strict (reported as "quotients strict").
CheckReport prop_b4_pipeline(const ReesBuilder& build, const WeightWindow& w, int p_max);

/// Image of C⁰ under μ: n ⊗ ∂̃^a ↦ (-1)^{|a|}∇_∂^a n equals Σ_{j+k≤p} F_jD·E_k(D) computed
/// directly, μ kills δ(C⁻¹), and μ is injective on H⁰ of the subcomplex of weight ≤ w
/// (w as large as the window allows). Since μ∘z = μ, the last one makes z injective there.
CheckReport tensor_image_check(const LatticeTower& t, const WeightWindow& w, int p_max);

struct EulerReport {
    bool bijective = true;
    /// "j=.. k=.. alpha=.." for each singular band.
    std::vector<std::string> failures;
};
/// Eu_j + k on N / Σ_{i∈I} N x_i for N = ω ⊗ V⁻¹E, per exponent band, k = 1..k_max.
/// Blocks with a pole along some i ∈ I restrict to zero.
EulerReport euler_bijectivity(const FormalConnection& c, const std::vector<std::size_t>& I, std::size_t j,
                              int k_max, const WeightWindow& w);

/// F_kD·E_0(D) matches the predicted staircase for k ≤ k_max, and in directions where a block
/// has no pole ∂_j^k: N/Nx_j → Nx_j^{-k}/Nx_j^{-k+1} is bijective.
CheckReport localization_check(const FormalConnection& c, const WeightWindow& w, int k_max);

struct TorsionCancellation {
    /// Per layer: Σ dim ker and Σ dim coker of z on gr_l T.
    std::vector<std::pair<std::size_t, std::size_t>> layers;
    bool cap_binds = false;
    bool cancels() const;
};
TorsionCancellation k0_torsion_cancellation(const GradedReesModule& m);

}  // namespace loglattice
