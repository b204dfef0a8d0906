#include "loglattice/geometry.hpp"

#include <algorithm>

#include "loglattice/errors.hpp"

namespace loglattice {

P1Point P1Point::parse(const std::string& s) {
    if (s == "inf" || s == "infinity" || s == "∞") return at_infinity();
    return at(parse_rational(s));
}

std::string P1Point::to_string() const { return infinity ? "inf" : loglattice::to_string(coord); }

BoundaryDivisor::BoundaryDivisor(std::vector<P1Point> points) : points_(std::move(points)) {
    for (std::size_t i = 0; i < points_.size(); ++i)
        for (std::size_t j = i + 1; j < points_.size(); ++j)
            if (points_[i] == points_[j])
                throw InvalidArgument("boundary point " + points_[i].to_string() + " listed twice");
}

BoundaryDivisor BoundaryDivisor::formal(std::size_t branches) {
    BoundaryDivisor d;
    d.formal_ = true;
    d.branches_ = branches;
    return d;
}

bool BoundaryDivisor::contains(const P1Point& p) const { return index_of(p) >= 0; }

long BoundaryDivisor::index_of(const P1Point& p) const {
    for (std::size_t i = 0; i < points_.size(); ++i)
        if (points_[i] == p) return static_cast<long>(i);
    return -1;
}

TwistDivisor::TwistDivisor(std::vector<int> mult) : mult_(std::move(mult)) {
    for (int m : mult_)
        if (m < 0) throw InvalidArgument("twist divisor must be effective");
}

int TwistDivisor::degree() const {
    int s = 0;
    for (int m : mult_) s += m;
    return s;
}

int LineBundleP1::degree() const {
    int d = base;
    for (int s : shifts) d += s;
    return d;
}

LineBundleP1 LineBundleP1::dual() const {
    LineBundleP1 r{-base, shifts};
    for (auto& s : r.shifts) s = -s;
    return r;
}

LineBundleP1 LineBundleP1::tensor(const LineBundleP1& o) const {
    LineBundleP1 r{base + o.base, shifts};
    r.shifts.resize(std::max(shifts.size(), o.shifts.size()), 0);
    for (std::size_t i = 0; i < o.shifts.size(); ++i) r.shifts[i] += o.shifts[i];
    return r;
}

std::string K0Class::to_string() const {
    return "(" + std::to_string(rank) + ", " + std::to_string(degree) + ")";
}

K0Class k0_class(const LineBundleP1& l) { return {1, l.degree()}; }

K0Class k0_class(const std::vector<SheafTerm>& terms) {
    K0Class c;
    for (const auto& t : terms) {
        const K0Class one = t.kind == SheafTerm::Kind::LineBundle ? k0_class(t.bundle)
                                                                  : K0Class{0, t.length};
        c = t.sign >= 0 ? c + one : c - one;
    }
    return c;
}

std::pair<long, long> line_bundle_cohomology(int k) {
    return {std::max(k + 1, 0), std::max(-k - 1, 0)};
}

LineBundleP1 log_forms(const BoundaryDivisor& d) {
    return {-2, std::vector<int>(d.size(), 1)};
}

LineBundleP1 canonical_bundle() { return LineBundleP1::of_degree(-2); }

long CechLineBundle::h0() const { return std::max(sinf + s0 + 1, 0); }
long CechLineBundle::h1() const { return std::max(-s0 - sinf - 1, 0); }

}  // namespace loglattice
