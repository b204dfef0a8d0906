#pragma once

#include <map>
#include <string>

#include "loglattice/rational.hpp"
#include "loglattice/weight_window.hpp"

namespace loglattice {

/// Multivariate Laurent polynomial whose support is confined to a window.
/// Terms that fall outside are dropped silently; `overflowed()` remembers that it happened.
class TruncatedLaurentSeries {
public:
    using Terms = std::map<Exponent, Rational>;

    explicit TruncatedLaurentSeries(WeightWindow w) : window_(std::move(w)) {}

    static TruncatedLaurentSeries monomial(const WeightWindow& w, const Exponent& a,
                                           const Rational& c = Rational(1));

    const WeightWindow& window() const { return window_; }
    std::size_t n_vars() const { return window_.n_vars(); }
    const Terms& terms() const { return terms_; }
    bool overflowed() const { return overflow_; }
    bool is_zero() const { return terms_.empty(); }

    Rational coefficient(const Exponent& a) const;

    /// Adds c·x^a. Outside the window this only raises the overflow flag.
    void add_term(const Exponent& a, const Rational& c);

    TruncatedLaurentSeries& operator+=(const TruncatedLaurentSeries& o);
    TruncatedLaurentSeries& operator-=(const TruncatedLaurentSeries& o);
    TruncatedLaurentSeries operator+(const TruncatedLaurentSeries& o) const;
    TruncatedLaurentSeries operator-(const TruncatedLaurentSeries& o) const;
    TruncatedLaurentSeries scaled_by(const Rational& c) const;

    /// Same coefficients seen in another window (terms outside are dropped).
    TruncatedLaurentSeries restricted(const WeightWindow& w) const;

    bool operator==(const TruncatedLaurentSeries& o) const { return terms_ == o.terms_; }

    std::string to_string() const;

private:
    void check_compatible(const TruncatedLaurentSeries& o) const;

    WeightWindow window_;
    Terms terms_;
    bool overflow_ = false;
};

/// Product of a and b; exponents outside w are discarded and flagged.
TruncatedLaurentSeries series_mul(const TruncatedLaurentSeries& a, const TruncatedLaurentSeries& b,
                                  const WeightWindow& w);

/// x_i ∂/∂x_i, acting on x^α by α_i.
TruncatedLaurentSeries log_derivation(const TruncatedLaurentSeries& f, std::size_t i);

}  // namespace loglattice
