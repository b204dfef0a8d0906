#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "loglattice/geometry.hpp"
#include "loglattice/laurent_series.hpp"
#include "loglattice/rational.hpp"
#include "loglattice/weight_window.hpp"

namespace loglattice {

using DenseMatrixQ = std::vector<std::vector<Rational>>;

/// φ = Σ c_β x^{-β}, β ∈ ℕ^n ∖ {0}.
class ExponentialFactor {
public:
    ExponentialFactor() = default;
    explicit ExponentialFactor(std::size_t n_vars) : n_(n_vars) {}
    /// Single term c·x^{-pole}.
    static ExponentialFactor monomial(const Exponent& pole, const Rational& c = Rational(1));

    std::size_t n_vars() const { return n_; }
    const std::map<Exponent, Rational>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    /// Adds c·x^{-beta}.
    void add_term(const Exponent& beta, const Rational& c);

    /// I_φ: componentwise maximum of the pole exponents (zero vector for φ = 0).
    Exponent pole_divisor() const;
    /// x^{-I_φ} itself occurs, so φ = u·x^{-I_φ} with u(0) ≠ 0.
    bool is_good() const;
    /// φ on a window (poles become negative exponents).
    TruncatedLaurentSeries as_series(const WeightWindow& w) const;
    std::string to_string() const;

    bool operator==(const ExponentialFactor&) const = default;

private:
    std::size_t n_ = 0;
    std::map<Exponent, Rational> terms_;
};

/// Regular part: per branch a residue λ_i and a nilpotent matrix N_i acting on the fibre.
/// ∇_{x_i∂_i} e_j = λ_i e_j + Σ_k N_i[k][j] e_k.
struct RegularBlock {
    std::size_t rank = 1;
    std::vector<Rational> residues;
    std::vector<DenseMatrixQ> nilpotent;  // empty means all zero

    static RegularBlock scalar(std::size_t n_vars, const Rational& lambda, std::size_t rank = 1);

    /// Every residue in [0, 1).
    bool tau_normalized() const;
    /// Shapes, nilpotency and pairwise commutation. Throws InvalidArgument.
    void validate(std::size_t n_vars) const;
    Rational nilpotent_entry(std::size_t i, std::size_t row, std::size_t col) const;
};

/// One summand L_φ ⊗ R.
struct ElementaryModel {
    ExponentialFactor phi;
    RegularBlock regular;

    std::size_t rank() const { return regular.rank; }

    /// One term of ∇ applied to a basis vector x^alpha e_fiber.
    struct Term {
        Exponent alpha;
        std::size_t fiber;
        Rational coeff;
    };
    /// ∇_{x_i∂_i}(x^alpha e_fiber).
    std::vector<Term> nabla_log(std::size_t i, const Exponent& alpha, std::size_t fiber) const;
};

/// Formal connection on a polydisc with boundary x_1 ... x_n = 0, as a direct sum of
/// elementary models.
class FormalConnection {
public:
    FormalConnection() = default;
    FormalConnection(std::size_t n_vars, std::vector<ElementaryModel> blocks);

    std::size_t n_vars() const { return n_; }
    const std::vector<ElementaryModel>& blocks() const { return blocks_; }
    std::size_t rank() const;
    BoundaryDivisor boundary() const { return BoundaryDivisor::formal(n_); }
    bool is_good() const;
    bool tau_normalized() const;
    /// Largest entry of any I_φ.
    int max_pole() const;

private:
    std::size_t n_ = 0;
    std::vector<ElementaryModel> blocks_;
};

/// ω = Σ c_k x^k dx on P¹, defining ∇ = d + ω on a rank one summand.
struct RankOneForm {
    std::map<int, Rational> coeffs;

    /// Coefficients of ω in the coordinate at p (x at 0, y = 1/x at ∞), as dy-form coefficients.
    std::map<int, Rational> local_coefficients(const P1Point& p) const;
    /// Pole order of the dy-form at p (0 when holomorphic).
    int pole_order(const P1Point& p) const;
};

/// Direct sum of rank one connections on P¹ ∖ D, with D ⊆ {0, ∞}.
class CurveConnection {
public:
    CurveConnection() = default;
    CurveConnection(BoundaryDivisor boundary, std::vector<RankOneForm> summands);

    const BoundaryDivisor& boundary() const { return boundary_; }
    const std::vector<RankOneForm>& summands() const { return summands_; }
    std::size_t rank() const { return summands_.size(); }

private:
    BoundaryDivisor boundary_;
    std::vector<RankOneForm> summands_;
};

/// Local formal type of a rank one summand at a boundary point.
/// The residue r is split as twist + λ with λ ∈ [0, 1): the Deligne–Malgrange lattice
/// is x^{-twist}·O·e in the original frame e.
struct LocalType {
    ExponentialFactor phi;
    Rational residue;
    int twist = 0;
    Rational lambda;

    /// Pole order of φ.
    int pole() const;
    ElementaryModel model() const;
};

LocalType local_formal_type(const RankOneForm& omega, const P1Point& p);
/// Every summand at p, as a one-variable formal connection.
FormalConnection local_formal_connection(const CurveConnection& c, const P1Point& p);

/// Seed lattice E_0: shift 0 per block. Throws InvalidArgument on a non-good block or
/// a residue outside [0, 1).
struct SeedLattice {
    std::vector<Exponent> shifts;  // pole order per block, all zero for the DM lattice
};
SeedLattice dm_lattice(const FormalConnection& f);

/// Local type with rational pole exponents: φ = Σ c_q x^{-q}, q > 0.
struct PuiseuxType {
    std::map<Rational, Rational> terms;
    Rational residue;
};

/// Pullback along t^rho = x: exponents and residue scale by rho.
PuiseuxType pullback(const PuiseuxType& t, int rho);
/// Unramified local type; throws RamifiedInput when some exponent is not integral.
LocalType local_formal_type(const PuiseuxType& t);
/// Smallest divisor rho of bound for which the pullback is unramified.
/// Throws RamifiedInput when none exists.
int ramification_index(const PuiseuxType& t, int bound);
/// Maximum over the summands of a direct sum.
int ramification_index(const std::vector<PuiseuxType>& summands, int bound);

/// Cyclic cover t_i^{rho_i} = x_i. Upstairs frame e'_j = t^{weights[j]}·f_j over the
/// downstairs frame f_j; the group acts on t^a e'_j through t^{a + weights[j]}.
/// Upstairs lattice: t^{-upstairs[j]}·O·e'_j.
struct KummerData {
    Exponent rho;
    std::vector<Exponent> weights;
    std::vector<Exponent> upstairs;
};

/// Downstairs pole orders of the invariant sublattice, found by enumerating invariant
/// monomials on the upstairs window. Throws WindowOverflow if the window is too small and
/// InvalidArgument when the data is inconsistent.
std::vector<Exponent> kummer_invariants(const KummerData& k, const WeightWindow& upstairs_window);
/// floor((s_up - a) / rho) per coordinate.
std::vector<Exponent> kummer_invariants_formula(const KummerData& k);

}  // namespace loglattice
