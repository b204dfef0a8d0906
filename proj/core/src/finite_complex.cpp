#include "loglattice/finite_complex.hpp"

#include <sstream>

#include "loglattice/errors.hpp"

namespace loglattice {

std::string BasisLabel::to_string() const {
    std::ostringstream os;
    os << "x^" << loglattice::to_string(alpha) << " e" << block << "." << fiber;
    if (frame) os << " w" << frame;
    if (!ops.empty()) os << " d^" << loglattice::to_string(ops);
    if (level) os << " z" << level;
    return os.str();
}

FiniteComplex::FiniteComplex(int lo, int hi) : lo_(lo), hi_(hi) {
    if (hi < lo) throw InvalidArgument("complex degree range is empty");
    const auto n = static_cast<std::size_t>(hi - lo + 1);
    spaces_.resize(n);
    diffs_.assign(n, SparseMatrixQ(0, 0));
    index_.resize(n);
    index_fresh_.assign(n, true);
}

void FiniteComplex::check_degree(int k) const {
    if (k < lo_ || k > hi_)
        throw InvalidArgument("degree " + std::to_string(k) + " outside complex range");
}

const std::vector<BasisLabel>& FiniteComplex::basis(int k) const {
    static const std::vector<BasisLabel> empty;
    if (k < lo_ || k > hi_) return empty;
    return spaces_[static_cast<std::size_t>(k - lo_)];
}

std::size_t FiniteComplex::dim(int k) const { return basis(k).size(); }

const SparseMatrixQ& FiniteComplex::differential(int k) const {
    check_degree(k);
    return diffs_[static_cast<std::size_t>(k - lo_)];
}

void FiniteComplex::set_basis(int k, std::vector<BasisLabel> b) {
    check_degree(k);
    const auto i = static_cast<std::size_t>(k - lo_);
    spaces_[i] = std::move(b);
    index_fresh_[i] = false;
}

void FiniteComplex::set_differential(int k, SparseMatrixQ d) {
    check_degree(k);
    diffs_[static_cast<std::size_t>(k - lo_)] = std::move(d);
}

void FiniteComplex::rebuild_index(int k) const {
    const auto i = static_cast<std::size_t>(k - lo_);
    if (index_fresh_[i]) return;
    index_[i].clear();
    for (std::size_t j = 0; j < spaces_[i].size(); ++j) index_[i].emplace(spaces_[i][j], j);
    index_fresh_[i] = true;
}

long FiniteComplex::index_of(int k, const BasisLabel& l) const {
    if (k < lo_ || k > hi_) return -1;
    rebuild_index(k);
    const auto& m = index_[static_cast<std::size_t>(k - lo_)];
    auto it = m.find(l);
    return it == m.end() ? -1 : static_cast<long>(it->second);
}

void FiniteComplex::verify() const {
    for (int k = lo_; k <= hi_; ++k) {
        const auto& d = differential(k);
        const std::size_t target = dim(k + 1);
        if (d.cols() == 0 && d.rows() == 0 && d.is_zero()) continue;
        if (d.cols() != dim(k) || d.rows() != target)
            throw InvalidArgument("differential in degree " + std::to_string(k) + " has shape " +
                                  std::to_string(d.rows()) + "x" + std::to_string(d.cols()) +
                                  ", expected " + std::to_string(target) + "x" +
                                  std::to_string(dim(k)));
    }
    for (int k = lo_; k < hi_; ++k) {
        const auto& a = differential(k);
        const auto& b = differential(k + 1);
        if (a.is_zero() || b.is_zero()) continue;
        if (!(b * a).is_zero())
            throw NotAComplex(k, "d^" + std::to_string(k + 1) + " o d^" + std::to_string(k) +
                                     " is not zero");
    }
}

long FiniteComplex::euler_characteristic() const {
    long e = 0;
    for (int k = lo_; k <= hi_; ++k) e += (k % 2 == 0 ? 1 : -1) * static_cast<long>(dim(k));
    return e;
}

DimensionMap complex_cohomology(const FiniteComplex& c) {
    c.verify();
    DimensionMap h;
    std::vector<std::size_t> rk;
    for (int k = c.lo(); k <= c.hi(); ++k) rk.push_back(rank_q(c.differential(k)));
    for (int k = c.lo(); k <= c.hi(); ++k) {
        const auto i = static_cast<std::size_t>(k - c.lo());
        const std::size_t in = i == 0 ? 0 : rk[i - 1];
        h[k] = c.dim(k) - rk[i] - in;
    }
    return h;
}

long euler_characteristic(const DimensionMap& h) {
    long e = 0;
    for (const auto& [k, v] : h) e += (k % 2 == 0 ? 1 : -1) * static_cast<long>(v);
    return e;
}

namespace {

// Unset differentials are stored as 0x0; give them their real shape.
SparseMatrixQ shaped_differential(const FiniteComplex& c, int k) {
    const auto& d = c.differential(k);
    if (d.rows() == c.dim(k + 1) && d.cols() == c.dim(k)) return d;
    return SparseMatrixQ(c.dim(k + 1), c.dim(k));
}

}  // namespace

DimensionMap band_cohomology(const FiniteComplex& c,
                             const std::function<bool(int, const BasisLabel&)>& in_band) {
    c.verify();
    DimensionMap h;
    for (int k = c.lo(); k <= c.hi(); ++k) {
        std::vector<std::size_t> band;
        const auto& b = c.basis(k);
        for (std::size_t j = 0; j < b.size(); ++j)
            if (in_band(k, b[j])) band.push_back(j);
        SparseMatrixQ a(band.size(), 0);
        if (k > c.lo() && c.dim(k - 1) > 0) a = shaped_differential(c, k - 1).select_rows(band);
        SparseMatrixQ d(0, band.size());
        if (k < c.hi() && c.dim(k + 1) > 0) d = shaped_differential(c, k).select_cols(band);
        const std::size_t ra = rank_q(a);
        const std::size_t rd = rank_q(d);
        std::size_t rda = 0;
        if (a.cols() > 0 && d.rows() > 0) rda = rank_q(d * a);
        h[k] = band.size() + rda - ra - rd;
    }
    return h;
}

FiniteComplex quotient_complex(const FiniteComplex& c,
                               const std::function<bool(int, const BasisLabel&)>& in_big,
                               const std::function<bool(int, const BasisLabel&)>& in_small) {
    c.verify();
    FiniteComplex q(c.lo(), c.hi());
    std::vector<std::vector<std::size_t>> keep(static_cast<std::size_t>(c.hi() - c.lo() + 1));
    for (int k = c.lo(); k <= c.hi(); ++k) {
        const auto& b = c.basis(k);
        std::vector<BasisLabel> nb;
        auto& kk = keep[static_cast<std::size_t>(k - c.lo())];
        for (std::size_t j = 0; j < b.size(); ++j) {
            const bool big = in_big(k, b[j]);
            const bool small = in_small(k, b[j]);
            if (small && !big) throw InvalidArgument("quotient: small part not inside big part");
            if (big && !small) {
                kk.push_back(j);
                nb.push_back(b[j]);
            }
        }
        q.set_basis(k, std::move(nb));
    }
    for (int k = c.lo(); k < c.hi(); ++k) {
        const SparseMatrixQ d = shaped_differential(c, k);
        const auto& src = c.basis(k);
        const auto& dst = c.basis(k + 1);
        for (const auto& [key, v] : d.entries()) {
            const bool sb = in_big(k, src[key.second]), ss = in_small(k, src[key.second]);
            const bool tb = in_big(k + 1, dst[key.first]), ts = in_small(k + 1, dst[key.first]);
            if (sb && !tb) throw InvalidArgument("quotient: big part is not a subcomplex");
            if (ss && !ts) throw InvalidArgument("quotient: small part is not a subcomplex");
        }
        q.set_differential(k, d.select_cols(keep[static_cast<std::size_t>(k - c.lo())])
                                  .select_rows(keep[static_cast<std::size_t>(k + 1 - c.lo())]));
    }
    return q;
}

FiniteComplex shifted(const FiniteComplex& c, int s) {
    FiniteComplex r(c.lo() - s, c.hi() - s);
    const Rational sign = (s % 2 == 0) ? 1 : -1;
    for (int k = r.lo(); k <= r.hi(); ++k) {
        r.set_basis(k, c.basis(k + s));
        r.set_differential(k, c.differential(k + s).scaled(sign));
    }
    return r;
}

bool is_acyclic(const DimensionMap& h) {
    for (const auto& [k, v] : h)
        if (v != 0) return false;
    return true;
}

std::string to_string(const DimensionMap& h) {
    std::ostringstream os;
    os << '{';
    bool first = true;
    for (const auto& [k, v] : h) {
        os << (first ? "" : ", ") << k << ": " << v;
        first = false;
    }
    os << '}';
    return os.str();
}

}  // namespace loglattice
