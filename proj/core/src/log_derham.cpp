#include "loglattice/log_derham.hpp"

#include <algorithm>
#include <bit>
#include <sstream>

#include "loglattice/errors.hpp"
#include "loglattice/one_variable.hpp"

namespace loglattice {

namespace {

int popcount(unsigned m) { return std::popcount(m); }

// Sign of dx_i ∧ dx_S relative to dx_{S ∪ i} in increasing order.
int wedge_sign(unsigned s, std::size_t i) {
    const unsigned below = s & ((1u << i) - 1u);
    return popcount(below) % 2 == 0 ? 1 : -1;
}

// Box [lower, upper] per (degree, block), degrees 0..n.
using BoxFn = std::function<std::pair<Exponent, Exponent>(int, std::size_t)>;

FiniteComplex box_complex(const FormalConnection& c, const BoxFn& box) {
    const std::size_t n = c.n_vars();
    const int top = static_cast<int>(n);
    FiniteComplex fc(0, top);
    std::vector<std::vector<std::pair<Exponent, Exponent>>> boxes(n + 1);
    for (int k = 0; k <= top; ++k) {
        std::vector<BasisLabel> basis;
        for (std::size_t b = 0; b < c.blocks().size(); ++b) {
            const auto bx = box(k, b);
            boxes[static_cast<std::size_t>(k)].push_back(bx);
            for (unsigned s = 0; s < (1u << n); ++s) {
                if (popcount(s) != k) continue;
                WeightWindow::for_each_in_box(bx.first, bx.second, [&](const Exponent& a) {
                    for (std::size_t j = 0; j < c.blocks()[b].rank(); ++j)
                        basis.push_back({a, static_cast<int>(b), static_cast<int>(j), s, {}, 0});
                });
            }
        }
        fc.set_basis(k, std::move(basis));
    }
    for (int k = 0; k < top; ++k) {
        const auto& src = fc.basis(k);
        SparseMatrixQ d(fc.dim(k + 1), src.size());
        for (std::size_t col = 0; col < src.size(); ++col) {
            const BasisLabel& l = src[col];
            const auto& blk = c.blocks()[static_cast<std::size_t>(l.block)];
            const auto& target_box = boxes[static_cast<std::size_t>(k + 1)][static_cast<std::size_t>(l.block)];
            for (std::size_t i = 0; i < n; ++i) {
                if (l.frame & (1u << i)) continue;
                const int sign = wedge_sign(l.frame, i);
                for (const auto& t : blk.nabla_log(i, l.alpha, static_cast<std::size_t>(l.fiber))) {
                    BasisLabel tl{t.alpha, l.block, static_cast<int>(t.fiber), l.frame | (1u << i), {}, 0};
                    const long row = fc.index_of(k + 1, tl);
                    if (row >= 0) {
                        d.add(static_cast<std::size_t>(row), col, t.coeff * sign);
                        continue;
                    }
                    if (!leq(t.alpha, target_box.second)) continue;  // above the cut
                    throw Error("differential leaves the complex below the lattice floor at " +
                                tl.to_string());
                }
            }
        }
        fc.set_differential(k, std::move(d));
    }
    for (int k = 0; k <= top; ++k)
        if (k == top || fc.dim(k) == 0) fc.set_differential(k, SparseMatrixQ(fc.dim(k + 1), fc.dim(k)));
    return fc;
}

Exponent delta_vec(const TwistDivisor& delta, std::size_t n) {
    if (delta.size() == 0) return Exponent(n, 0);
    if (delta.size() != n) throw InvalidArgument("twist divisor has wrong length");
    return delta.multiplicities();
}

void require_inside(const Exponent& lower, const WeightWindow& w, const std::string& what) {
    for (std::size_t i = 0; i < lower.size(); ++i)
        if (lower[i] < w.lo()[i])
            throw WindowOverflow(what + " needs exponent " + std::to_string(lower[i]) + " below the window " +
                                 w.describe());
}

}  // namespace

FiniteComplex FilteredComplex::level(const std::string& name, int p) const {
    const auto& pred = filtrations.at(name).at(p);
    return quotient_complex(base, pred, [](int, const BasisLabel&) { return false; });
}

FiniteComplex FilteredComplex::graded(const std::string& name, int p, bool increasing) const {
    const auto& levels = filtrations.at(name);
    const auto& big = levels.at(p);
    auto it = levels.find(increasing ? p - 1 : p + 1);
    if (it == levels.end()) return quotient_complex(base, big, [](int, const BasisLabel&) { return false; });
    return quotient_complex(base, big, it->second);
}

FilteredComplex build_log_complex(const LatticeTower& t, const TwistDivisor& delta, const WeightWindow& w, int q0) {
    const std::size_t n = t.n_vars();
    if (w.n_vars() != n) throw InvalidArgument("window has wrong number of variables");
    if (t.depth() < n && !t.connection().blocks().empty())
        throw InvalidArgument("tower depth " + std::to_string(t.depth()) + " is smaller than n_vars");
    if (q0 < 0) throw InvalidArgument("q0 must be >= 0");
    const auto& conn = t.connection();
    BoxFn box = [&](int k, std::size_t b) {
        const Exponent lower = scaled(t.floor_shift(b, q0 + k, delta), -1);
        require_inside(lower, w, "lattice E_" + std::to_string(q0 + k) + " of block " + std::to_string(b));
        const Exponent upper = exp_sub(w.hi(), scaled(conn.blocks()[b].phi.pole_divisor(), k));
        return std::make_pair(lower, upper);
    };
    FilteredComplex fc{box_complex(conn, box), w, {}};
    for (int q = 0; q <= q0; ++q)
        fc.filtrations["F"][q] = [t, delta, q](int k, const BasisLabel& l) {
            return leq(scaled(t.floor_shift(static_cast<std::size_t>(l.block), q + k, delta), -1), l.alpha);
        };
    for (int p = 0; p <= static_cast<int>(n) + 1; ++p)
        fc.filtrations["sigma"][p] = [p](int k, const BasisLabel&) { return k >= p; };
    return fc;
}

FiniteComplex graded_F_piece(const LatticeTower& t, const TwistDivisor& delta, const WeightWindow& w, int q) {
    if (q < 0) throw InvalidArgument("graded piece index must be >= 0");
    FilteredComplex fc = build_log_complex(t, delta, w, q);
    if (q == 0) return fc.base;
    return fc.graded("F", q, true);
}

std::vector<WeightWindow> stabilization_windows(const WeightWindow& w) {
    return {w, w.enlarged(2), w.enlarged(4)};
}

WeightWindow covering_window(const WeightWindow& w, const Exponent& need_lo) {
    Exponent lo = w.lo();
    for (std::size_t i = 0; i < lo.size(); ++i) lo[i] = std::min(lo[i], need_lo[i] - 1);
    return WeightWindow(lo, w.hi());
}

bool StabilizedCohomology::stable() const {
    return std::all_of(dims.begin(), dims.end(), [&](const DimensionMap& d) { return d == dims.front(); });
}

StabilizedCohomology stabilized(const std::function<DimensionMap(const WeightWindow&)>& f, const WeightWindow& w) {
    StabilizedCohomology s;
    s.windows = stabilization_windows(w);
    for (const auto& win : s.windows) s.dims.push_back(f(win));
    return s;
}

bool CheckReport::pass() const {
    return std::all_of(entries.begin(), entries.end(), [](const CheckEntry& e) { return e.pass; });
}

std::string CheckReport::failures() const {
    std::ostringstream os;
    for (const auto& e : entries)
        if (!e.pass) os << name << "[" << e.label << "] " << to_string(e.dims) << " " << e.detail << "; ";
    return os.str();
}

CheckReport check_alpha(const LatticeTower& t, const TwistDivisor& delta, const WeightWindow& w, int q_max) {
    CheckReport r{"alpha", {}};
    const std::size_t n = t.n_vars();
    for (int q = 1; q <= q_max; ++q) {
        Exponent need(n, 0);
        for (std::size_t b = 0; b < t.connection().blocks().size(); ++b)
            need = componentwise_min(need, scaled(t.floor_shift(b, q + static_cast<int>(n), delta), -1));
        const WeightWindow win = covering_window(w, need);
        auto s = stabilized([&](const WeightWindow& v) { return complex_cohomology(graded_F_piece(t, delta, v, q)); },
                            win);
        CheckEntry e{"q=" + std::to_string(q), s.value(), s.stable(), false, "window " + win.describe()};
        e.pass = e.stable && is_acyclic(e.dims);
        r.entries.push_back(std::move(e));
    }
    return r;
}

FiniteComplex build_box_complex(const FormalConnection& c, const TwistDivisor& delta, const WeightWindow& w,
                                LowerEnd mode) {
    const std::size_t n = c.n_vars();
    if (w.n_vars() != n) throw InvalidArgument("window has wrong number of variables");
    const Exponent dv = delta_vec(delta, n);
    BoxFn box = [&](int k, std::size_t b) {
        const Exponent m = c.blocks()[b].phi.pole_divisor();
        Exponent lower(n), upper(n);
        for (std::size_t i = 0; i < n; ++i) {
            upper[i] = w.hi()[i] - k * m[i];
            if (m[i] > 0)
                lower[i] = w.lo()[i] + (static_cast<int>(n) - k) * m[i];
            else
                lower[i] = mode == LowerEnd::Localized ? w.lo()[i] : -dv[i];
        }
        require_inside(lower, w, "block " + std::to_string(b));
        return std::make_pair(lower, upper);
    };
    return box_complex(c, box);
}

long PoleFiltration::length(int k) const {
    if (k < 0 || k >= k_max) throw InvalidArgument("pole filtration length index out of range");
    long s = 0;
    for (std::size_t b = 0; b < floors.size(); ++b)
        s += static_cast<long>(ranks[b]) * (floors[b][static_cast<std::size_t>(k)] -
                                            floors[b][static_cast<std::size_t>(k + 1)]);
    return s;
}

PoleFiltration pole_filtration(const FormalConnection& c, const TwistDivisor& delta, const WeightWindow& w,
                               int k_max) {
    if (c.n_vars() != 1 || w.n_vars() != 1) throw InvalidArgument("pole filtration is implemented for n = 1");
    if (k_max < 0) throw InvalidArgument("k_max must be >= 0");
    const int d = delta_vec(delta, 1)[0];
    PoleFiltration pf{w, k_max, {}, {}, {}};
    for (std::size_t b = 0; b < c.blocks().size(); ++b) {
        const auto& blk = c.blocks()[b];
        const bool irregular = blk.phi.pole_divisor()[0] > 0;
        const int v0 = irregular ? w.lo()[0] : -d;
        const int p0 = irregular ? w.lo()[0] : -d - 1;
        require_inside({p0}, w, "P^0 of block " + std::to_string(b));
        std::vector<int> fl{p0};
        for (int k = 1; k <= k_max; ++k) fl.push_back(-derivation_step(blk, -fl.back(), w, true));
        pf.floors.push_back(std::move(fl));
        pf.v0_floor.push_back(v0);
        pf.ranks.push_back(blk.rank());
    }
    return pf;
}

std::vector<int> lattice_pole_raise(const FormalConnection& c, const WeightWindow& w, int k) {
    if (c.n_vars() != 1) throw InvalidArgument("lattice_pole_raise is implemented for n = 1");
    std::vector<int> out;
    for (const auto& blk : c.blocks()) {
        int s = 1;
        for (int i = 0; i < k; ++i) s = derivation_step(blk, s, w, false);
        out.push_back(s);
    }
    return out;
}

namespace {

struct PSigmaVerdict {
    long first = 0;
    long second = 0;
    bool ok = true;
};

// One block, one p. The σ-side is V⁰(Δ) in degree 0 for p = 0, Ω¹(log)⊗V⁰(Δ) in degree 1 for p = 1,
// and zero for p < 0.
PSigmaVerdict p_sigma_block(const ElementaryModel& blk, const std::vector<int>& fl, int v0, const WeightWindow& w,
                            int p) {
    const int lo = w.lo()[0], hi = w.hi()[0];
    const long r = static_cast<long>(blk.rank());
    PSigmaVerdict v;
    if (p == 1) {
        // x^a dx/x ↦ x^{a-1} dx between the parts that stay inside the window.
        const Range1 src{std::max(v0, lo + 1), hi};
        const Range1 dst{std::max(fl[0], lo), hi - 1};
        v.first = static_cast<long>(src.count()) * r;
        v.second = static_cast<long>(dst.count()) * r;
        v.ok = src.lo - 1 == dst.lo && src.count() == dst.count();
        v.first = v.ok ? 0 : v.first;
        v.second = v.ok ? 0 : v.second;
        return v;
    }
    if (p == 0) {
        const Range1 src{fl[0], hi};
        const Range1 dst{fl[1], fl[0] - 1};
        const SparseMatrixQ m = one_variable_matrix(blk, src, dst, true);
        const long rank = static_cast<long>(rank_q(m));
        const long ker = static_cast<long>(src.count()) * r - rank;
        const long v0dim = static_cast<long>(Range1{v0, hi}.count()) * r;
        std::vector<std::size_t> v0cols;
        for (int a = v0; a <= hi; ++a)
            for (long j = 0; j < r; ++j) v0cols.push_back(static_cast<std::size_t>((a - src.lo) * r + j));
        const bool v0_in_kernel = m.select_cols(v0cols).is_zero();
        v.first = ker - v0dim;
        v.second = static_cast<long>(dst.count()) * r - rank;
        v.ok = v0_in_kernel && v.first == 0 && v.second == 0;
        return v;
    }
    const std::size_t k = static_cast<std::size_t>(-p);
    const Range1 src{fl[k], fl[k - 1] - 1};
    const Range1 dst{fl[k + 1], fl[k] - 1};
    const long rank = static_cast<long>(rank_q(one_variable_matrix(blk, src, dst, true)));
    v.first = static_cast<long>(src.count()) * r - rank;
    v.second = static_cast<long>(dst.count()) * r - rank;
    v.ok = v.first == 0 && v.second == 0;
    return v;
}

}  // namespace

CheckReport check_filtered_qis_P_sigma(const FormalConnection& c, const TwistDivisor& delta, const WeightWindow& w,
                                       int k_max) {
    if (c.n_vars() != 1) throw InvalidArgument("P/sigma comparison is implemented for n = 1");
    CheckReport r{"P_sigma", {}};
    const int d = delta_vec(delta, 1)[0];
    const WeightWindow base = covering_window(w, {-d - 1});
    std::vector<std::vector<PSigmaVerdict>> per_window;
    for (const auto& win : stabilization_windows(base)) {
        const PoleFiltration pf = pole_filtration(c, delta, win, k_max + 1);
        std::vector<PSigmaVerdict> row;
        for (int p = 1; p >= -k_max; --p) {
            PSigmaVerdict tot;
            for (std::size_t b = 0; b < c.blocks().size(); ++b) {
                const auto v = p_sigma_block(c.blocks()[b], pf.floors[b], pf.v0_floor[b], win, p);
                tot.first += v.first;
                tot.second += v.second;
                tot.ok = tot.ok && v.ok;
            }
            row.push_back(tot);
        }
        per_window.push_back(std::move(row));
    }
    for (std::size_t i = 0; i < per_window.front().size(); ++i) {
        const int p = 1 - static_cast<int>(i);
        const auto& v = per_window.front()[i];
        CheckEntry e{"p=" + std::to_string(p), {{0, static_cast<std::size_t>(std::labs(v.first))},
                                                {1, static_cast<std::size_t>(std::labs(v.second))}},
                     true, v.ok, ""};
        for (const auto& row : per_window)
            e.stable = e.stable && row[i].ok == v.ok && row[i].first == v.first && row[i].second == v.second;
        e.pass = e.stable && v.ok;
        if (!v.ok)
            e.detail = p == 0 ? "kernel of P^0 -> gr^{-1}_P differs from V0(Delta) or cokernel is nonzero"
                              : "graded piece of the pole filtration is not acyclic";
        r.entries.push_back(std::move(e));
    }
    return r;
}

CheckReport check_beta(const FormalConnection& c, const TwistDivisor& delta, const WeightWindow& w) {
    CheckReport r{"beta", {}};
    const std::size_t n = c.n_vars();
    const Exponent dv = delta_vec(delta, n);
    const WeightWindow base = covering_window(w, scaled(dv, -1));
    auto log_side = stabilized([&](const WeightWindow& v) {
        return complex_cohomology(build_box_complex(c, delta, v, LowerEnd::V0));
    }, base);
    auto loc_side = stabilized([&](const WeightWindow& v) {
        return complex_cohomology(build_box_complex(c, delta, v, LowerEnd::Localized));
    }, base);
    CheckEntry e{"cohomology", log_side.value(), log_side.stable() && loc_side.stable(), false, ""};
    e.pass = e.stable && log_side.value() == loc_side.value();
    if (!e.pass) e.detail = "log side " + to_string(log_side.value()) + " vs localized " + to_string(loc_side.value());
    r.entries.push_back(std::move(e));
    if (n == 1) {
        const CheckReport ps = check_filtered_qis_P_sigma(c, delta, w);
        for (auto pe : ps.entries) {
            pe.label = "P_sigma " + pe.label;
            r.entries.push_back(std::move(pe));
        }
    }
    return r;
}

}  // namespace loglattice
