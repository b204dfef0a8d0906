#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "loglattice/rational.hpp"

namespace loglattice {

/// A point of P¹: a rational coordinate or ∞.
struct P1Point {
    bool infinity = false;
    Rational coord;

    static P1Point at(const Rational& c) { return {false, c}; }
    static P1Point at_infinity() { return {true, Rational(0)}; }
    /// "inf", "∞" or a rational.
    static P1Point parse(const std::string& s);

    bool operator==(const P1Point& o) const {
        return infinity == o.infinity && (infinity || coord == o.coord);
    }
    std::string to_string() const;
};

/// Reduced boundary divisor. On P¹ a list of distinct points; on a formal
/// polydisc the branches x_1 ... x_l = 0.
class BoundaryDivisor {
public:
    BoundaryDivisor() = default;
    explicit BoundaryDivisor(std::vector<P1Point> points);
    /// x_1 ... x_l = 0 in a polydisc.
    static BoundaryDivisor formal(std::size_t branches);

    bool is_formal() const { return formal_; }
    std::size_t size() const { return formal_ ? branches_ : points_.size(); }
    const std::vector<P1Point>& points() const { return points_; }
    bool contains(const P1Point& p) const;
    /// Position of p in points(), or -1.
    long index_of(const P1Point& p) const;

private:
    bool formal_ = false;
    std::size_t branches_ = 0;
    std::vector<P1Point> points_;
};

/// Effective divisor supported on the boundary: one multiplicity per component.
class TwistDivisor {
public:
    TwistDivisor() = default;
    explicit TwistDivisor(std::vector<int> mult);
    static TwistDivisor zero(std::size_t n) { return TwistDivisor(std::vector<int>(n, 0)); }
    /// k·D
    static TwistDivisor multiple(std::size_t n, int k) { return TwistDivisor(std::vector<int>(n, k)); }

    const std::vector<int>& multiplicities() const { return mult_; }
    std::size_t size() const { return mult_.size(); }
    int operator[](std::size_t i) const { return mult_.at(i); }
    int degree() const;
    bool operator==(const TwistDivisor&) const = default;

private:
    std::vector<int> mult_;
};

/// Line bundle on P¹ presented as O(base) twisted by allowed pole orders at the
/// marked points: sections near p may have poles of order shifts[p].
struct LineBundleP1 {
    int base = 0;
    std::vector<int> shifts;

    static LineBundleP1 of_degree(int k) { return {k, {}}; }
    int degree() const;
    LineBundleP1 dual() const;
    LineBundleP1 tensor(const LineBundleP1& o) const;
};

/// Class in K_0(O_{P¹}) ≅ ℤ², via (rank, degree).
struct K0Class {
    long rank = 0;
    long degree = 0;

    K0Class operator+(const K0Class& o) const { return {rank + o.rank, degree + o.degree}; }
    K0Class operator-(const K0Class& o) const { return {rank - o.rank, degree - o.degree}; }
    K0Class operator-() const { return {-rank, -degree}; }
    bool operator==(const K0Class&) const = default;
    std::string to_string() const;
};

/// Summand of a formal sum: a line bundle, or a skyscraper of some length.
struct SheafTerm {
    enum class Kind { LineBundle, Skyscraper } kind = Kind::LineBundle;
    LineBundleP1 bundle;
    long length = 0;
    int sign = 1;

    static SheafTerm line(const LineBundleP1& l, int sign = 1) { return {Kind::LineBundle, l, 0, sign}; }
    static SheafTerm skyscraper(long len, int sign = 1) { return {Kind::Skyscraper, {}, len, sign}; }
};

K0Class k0_class(const std::vector<SheafTerm>& terms);
K0Class k0_class(const LineBundleP1& l);

/// (h0, h1) of O(k) on P¹.
std::pair<long, long> line_bundle_cohomology(int k);

/// Ω¹(log D) on P¹: ω_{P¹} with a simple pole allowed at every point of D.
LineBundleP1 log_forms(const BoundaryDivisor& d);
/// ω_{P¹} = O(-2).
LineBundleP1 canonical_bundle();

/// Čech description of O(s0·[0] + s∞·[∞]) on the standard cover.
/// Global sections are x^k with -s0 ≤ k ≤ s∞; H¹ is spanned by x^k with s∞ < k < -s0.
struct CechLineBundle {
    int s0 = 0;
    int sinf = 0;

    int degree() const { return s0 + sinf; }
    /// Exponent range [first, last] of H⁰ (empty when first > last).
    std::pair<int, int> h0_range() const { return {-s0, sinf}; }
    std::pair<int, int> h1_range() const { return {sinf + 1, -s0 - 1}; }
    long h0() const;
    long h1() const;
};

}  // namespace loglattice
