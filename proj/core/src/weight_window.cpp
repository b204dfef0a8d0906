#include "loglattice/weight_window.hpp"

#include <sstream>

#include "loglattice/errors.hpp"

namespace loglattice {

WeightWindow::WeightWindow(Exponent lo, Exponent hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
    if (lo_.size() != hi_.size()) throw InvalidArgument("window lo/hi length mismatch");
    for (std::size_t i = 0; i < lo_.size(); ++i)
        if (lo_[i] > hi_[i])
            throw InvalidArgument("window lo > hi in variable " + std::to_string(i));
}

WeightWindow WeightWindow::cube(std::size_t n, int lo, int hi) {
    return WeightWindow(Exponent(n, lo), Exponent(n, hi));
}

bool WeightWindow::contains(const Exponent& a) const {
    if (a.size() != lo_.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] < lo_[i] || a[i] > hi_[i]) return false;
    return true;
}

WeightWindow WeightWindow::enlarged(int k) const {
    Exponent lo = lo_, hi = hi_;
    for (auto& v : lo) v -= k;
    for (auto& v : hi) v += k;
    return WeightWindow(lo, hi);
}

std::size_t WeightWindow::size() const {
    std::size_t s = 1;
    for (std::size_t i = 0; i < lo_.size(); ++i) s *= static_cast<std::size_t>(hi_[i] - lo_[i] + 1);
    return s;
}

std::string WeightWindow::describe() const {
    return to_string(lo_) + ".." + to_string(hi_);
}

Exponent exp_add(const Exponent& a, const Exponent& b) {
    if (a.size() != b.size()) throw InvalidArgument("exponent length mismatch");
    Exponent r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

Exponent exp_sub(const Exponent& a, const Exponent& b) {
    if (a.size() != b.size()) throw InvalidArgument("exponent length mismatch");
    Exponent r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

Exponent scaled(const Exponent& a, int k) {
    Exponent r(a);
    for (auto& v : r) v *= k;
    return r;
}

bool leq(const Exponent& a, const Exponent& b) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] > b[i]) return false;
    return true;
}

Exponent componentwise_max(const Exponent& a, const Exponent& b) {
    Exponent r(a);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = std::max(a[i], b[i]);
    return r;
}

Exponent componentwise_min(const Exponent& a, const Exponent& b) {
    Exponent r(a);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = std::min(a[i], b[i]);
    return r;
}

std::string to_string(const Exponent& a) {
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < a.size(); ++i) os << (i ? "," : "") << a[i];
    os << ')';
    return os.str();
}

}  // namespace loglattice
