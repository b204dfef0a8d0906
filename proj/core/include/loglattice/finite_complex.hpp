#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "loglattice/sparse_matrix.hpp"
#include "loglattice/weight_window.hpp"

namespace loglattice {

/// Name of one basis vector of a free module on a window.
/// x^alpha · e_fiber (of summand `block`) ⊗ (wedge of the frames set in `frame`),
/// optionally times a monomial operator with exponents `ops` at Rees level `level`.
struct BasisLabel {
    Exponent alpha;
    int block = 0;
    int fiber = 0;
    unsigned frame = 0;
    Exponent ops;
    int level = 0;

    auto operator<=>(const BasisLabel&) const = default;
    std::string to_string() const;
};

using DimensionMap = std::map<int, std::size_t>;

/// Bounded cochain complex C^lo -> ... -> C^hi of finite dimensional ℚ-spaces.
/// differential(k) maps C^k to C^{k+1}: rows index C^{k+1}, columns index C^k.
class FiniteComplex {
public:
    FiniteComplex() = default;
    /// Zero complex concentrated in degrees [lo, hi].
    FiniteComplex(int lo, int hi);

    int lo() const { return lo_; }
    int hi() const { return hi_; }

    const std::vector<BasisLabel>& basis(int k) const;
    std::size_t dim(int k) const;
    const SparseMatrixQ& differential(int k) const;

    void set_basis(int k, std::vector<BasisLabel> b);
    void set_differential(int k, SparseMatrixQ d);

    /// Index of `l` inside basis(k), or -1.
    long index_of(int k, const BasisLabel& l) const;

    /// Throws NotAComplex naming the first degree where d∘d != 0,
    /// or InvalidArgument when a matrix shape disagrees with the bases.
    void verify() const;

    /// Σ (-1)^k dim C^k
    long euler_characteristic() const;

private:
    void check_degree(int k) const;
    void rebuild_index(int k) const;

    int lo_ = 0;
    int hi_ = -1;
    std::vector<std::vector<BasisLabel>> spaces_;
    std::vector<SparseMatrixQ> diffs_;
    mutable std::vector<std::map<BasisLabel, std::size_t>> index_;
    mutable std::vector<bool> index_fresh_;
};

/// dim H^k for every k. Runs verify() first.
DimensionMap complex_cohomology(const FiniteComplex& c);

/// Σ (-1)^k h^k
long euler_characteristic(const DimensionMap& h);

/// Cohomology seen through a band. Basis vectors outside the band are treated as
/// truncation debris: a band cycle counts as trivial once it is a boundary
/// modulo the span of out-of-band vectors.
/// h^k = #band_k + rank(D·A) - rank(A) - rank(D), where A is d_{k-1} cut to band rows
/// and D is d_k cut to band columns.
DimensionMap band_cohomology(const FiniteComplex& c,
                             const std::function<bool(int, const BasisLabel&)>& in_band);

/// Quotient complex C_big / C_small where both are given as subsets of the basis of `c`
/// (each must be a subcomplex; checked).
FiniteComplex quotient_complex(const FiniteComplex& c,
                               const std::function<bool(int, const BasisLabel&)>& in_big,
                               const std::function<bool(int, const BasisLabel&)>& in_small);

/// C[s]: degree k of the result is degree k+s of c, differential multiplied by (-1)^s.
FiniteComplex shifted(const FiniteComplex& c, int s);

bool is_acyclic(const DimensionMap& h);
std::string to_string(const DimensionMap& h);

}  // namespace loglattice
