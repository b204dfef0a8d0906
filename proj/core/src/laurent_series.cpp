#include "loglattice/laurent_series.hpp"

#include <sstream>

#include "loglattice/errors.hpp"

namespace loglattice {

TruncatedLaurentSeries TruncatedLaurentSeries::monomial(const WeightWindow& w, const Exponent& a,
                                                        const Rational& c) {
    TruncatedLaurentSeries s(w);
    s.add_term(a, c);
    return s;
}

Rational TruncatedLaurentSeries::coefficient(const Exponent& a) const {
    auto it = terms_.find(a);
    return it == terms_.end() ? Rational(0) : it->second;
}

void TruncatedLaurentSeries::add_term(const Exponent& a, const Rational& c) {
    if (a.size() != n_vars()) throw InvalidArgument("exponent has wrong number of variables");
    if (c == 0) return;
    if (!window_.contains(a)) {
        overflow_ = true;
        return;
    }
    auto [it, fresh] = terms_.try_emplace(a, c);
    if (!fresh) {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

void TruncatedLaurentSeries::check_compatible(const TruncatedLaurentSeries& o) const {
    if (o.n_vars() != n_vars()) throw InvalidArgument("variable count mismatch");
}

TruncatedLaurentSeries& TruncatedLaurentSeries::operator+=(const TruncatedLaurentSeries& o) {
    check_compatible(o);
    for (const auto& [a, c] : o.terms_) add_term(a, c);
    overflow_ = overflow_ || o.overflow_;
    return *this;
}

TruncatedLaurentSeries& TruncatedLaurentSeries::operator-=(const TruncatedLaurentSeries& o) {
    check_compatible(o);
    for (const auto& [a, c] : o.terms_) add_term(a, -c);
    overflow_ = overflow_ || o.overflow_;
    return *this;
}

TruncatedLaurentSeries TruncatedLaurentSeries::operator+(const TruncatedLaurentSeries& o) const {
    TruncatedLaurentSeries r(*this);
    r += o;
    return r;
}

TruncatedLaurentSeries TruncatedLaurentSeries::operator-(const TruncatedLaurentSeries& o) const {
    TruncatedLaurentSeries r(*this);
    r -= o;
    return r;
}

TruncatedLaurentSeries TruncatedLaurentSeries::scaled_by(const Rational& c) const {
    TruncatedLaurentSeries r(window_);
    r.overflow_ = overflow_;
    if (c == 0) return r;
    for (const auto& [a, v] : terms_) r.terms_.emplace(a, v * c);
    return r;
}

TruncatedLaurentSeries TruncatedLaurentSeries::restricted(const WeightWindow& w) const {
    if (w.n_vars() != n_vars()) throw InvalidArgument("variable count mismatch");
    TruncatedLaurentSeries r(w);
    r.overflow_ = overflow_;
    for (const auto& [a, c] : terms_) r.add_term(a, c);
    return r;
}

std::string TruncatedLaurentSeries::to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [a, c] : terms_) {
        if (!first) os << " + ";
        first = false;
        os << loglattice::to_string(c) << "*x^" << loglattice::to_string(a);
    }
    return os.str();
}

TruncatedLaurentSeries series_mul(const TruncatedLaurentSeries& a, const TruncatedLaurentSeries& b,
                                  const WeightWindow& w) {
    if (a.n_vars() != w.n_vars() || b.n_vars() != w.n_vars())
        throw InvalidArgument("series_mul: variable count mismatch");
    TruncatedLaurentSeries r(w);
    for (const auto& [ea, ca] : a.terms())
        for (const auto& [eb, cb] : b.terms()) r.add_term(exp_add(ea, eb), ca * cb);
    return r;
}

TruncatedLaurentSeries log_derivation(const TruncatedLaurentSeries& f, std::size_t i) {
    if (i >= f.n_vars()) throw InvalidArgument("log_derivation: variable index out of range");
    TruncatedLaurentSeries r(f.window());
    for (const auto& [a, c] : f.terms()) r.add_term(a, c * a[i]);
    return r;
}

}  // namespace loglattice
