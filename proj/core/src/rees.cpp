#include "loglattice/rees.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "loglattice/errors.hpp"

namespace loglattice {

namespace {

using Column = std::vector<std::pair<std::size_t, Rational>>;

std::vector<Column> columns_of(const SparseMatrixQ& m) {
    std::vector<Column> cols(m.cols());
    for (const auto& [key, v] : m.entries()) cols[key.second].push_back({key.first, v});
    return cols;
}

std::map<BasisLabel, std::size_t> index_map(const std::vector<BasisLabel>& b) {
    std::map<BasisLabel, std::size_t> idx;
    for (std::size_t i = 0; i < b.size(); ++i) idx.emplace(b[i], i);
    return idx;
}

BasisLabel bare(const BasisLabel& l) { return {l.alpha, l.block, l.fiber, 0, {}, l.level}; }

Exponent unit(std::size_t n, std::size_t i) {
    Exponent e(n, 0);
    e[i] = 1;
    return e;
}

bool below(const Exponent& a, const Exponent& bound) { return leq(a, bound); }

std::vector<std::size_t> positions(const std::vector<BasisLabel>& b,
                                   const std::function<bool(const BasisLabel&)>& keep) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < b.size(); ++i)
        if (keep(b[i])) out.push_back(i);
    return out;
}

SparseMatrixQ unit_columns(std::size_t rows, const std::vector<std::size_t>& which) {
    SparseMatrixQ m(rows, which.size());
    for (std::size_t j = 0; j < which.size(); ++j) m.set(which[j], j, Rational(1));
    return m;
}

// Dense kernel basis over ℚ, as columns.
SparseMatrixQ nullspace(const SparseMatrixQ& m) {
    auto a = m.to_dense();
    const std::size_t rows = m.rows(), cols = m.cols();
    std::vector<long> pivot_of_col(cols, -1);
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t p = r;
        while (p < rows && a[p][c] == 0) ++p;
        if (p == rows) continue;
        std::swap(a[p], a[r]);
        const Rational inv = 1 / a[r][c];
        for (auto& v : a[r]) v *= inv;
        for (std::size_t i = 0; i < rows; ++i)
            if (i != r && a[i][c] != 0) {
                const Rational f = a[i][c];
                for (std::size_t j = 0; j < cols; ++j) a[i][j] -= f * a[r][j];
            }
        pivot_of_col[c] = static_cast<long>(r);
        ++r;
    }
    std::vector<std::size_t> free_cols;
    for (std::size_t c = 0; c < cols; ++c)
        if (pivot_of_col[c] < 0) free_cols.push_back(c);
    SparseMatrixQ k(cols, free_cols.size());
    for (std::size_t f = 0; f < free_cols.size(); ++f) {
        k.set(free_cols[f], f, Rational(1));
        for (std::size_t c = 0; c < cols; ++c)
            if (pivot_of_col[c] >= 0) {
                const Rational v = -a[static_cast<std::size_t>(pivot_of_col[c])][free_cols[f]];
                if (v != 0) k.set(c, f, v);
            }
    }
    return k;
}

// z^l from degree q to q + l.
SparseMatrixQ z_power(const GradedReesModule& m, int q, int l) {
    SparseMatrixQ p = SparseMatrixQ::identity(m.dim(q));
    for (int i = 0; i < l; ++i) p = m.z_of(q + i) * p;
    return p;
}

std::size_t block_count(const GradedReesModule& m) {
    std::size_t nb = m.lowering.size();
    for (const auto& b : m.basis)
        for (const auto& l : b) nb = std::max(nb, static_cast<std::size_t>(l.block) + 1);
    return nb;
}

Exponent hi_minus(const Exponent& hi, int k) {
    Exponent e = hi;
    for (auto& v : e) v -= k;
    return e;
}

void allocate(GradedReesModule& m) {
    const std::size_t span = static_cast<std::size_t>(m.p_hi - m.p_lo + 1);
    m.basis.assign(span, {});
    m.z.assign(span - 1, {});
    m.x.assign(m.n_vars(), std::vector<SparseMatrixQ>(span));
    m.theta.assign(m.n_vars(), std::vector<SparseMatrixQ>(span - 1));
}

// Fills z, x and theta of a monomial module; theta_terms(i, label) lists the image of one basis vector.
void fill_monomial_actions(
    GradedReesModule& m,
    const std::function<std::vector<std::pair<BasisLabel, Rational>>(std::size_t, const BasisLabel&)>& theta_terms,
    const std::function<bool(std::size_t, const BasisLabel&)>& x_kills) {
    const std::size_t n = m.n_vars();
    std::vector<std::map<BasisLabel, std::size_t>> idx;
    for (const auto& b : m.basis) idx.push_back(index_map(b));
    const auto lookup = [&](int q, const BasisLabel& l) -> long {
        const auto& map = idx[static_cast<std::size_t>(q - m.p_lo)];
        auto it = map.find(l);
        return it == map.end() ? -1 : static_cast<long>(it->second);
    };
    for (int q = m.p_lo; q <= m.p_hi; ++q) {
        const auto& b = m.basis_of(q);
        const std::size_t s = static_cast<std::size_t>(q - m.p_lo);
        for (std::size_t i = 0; i < n; ++i) {
            SparseMatrixQ xi(b.size(), b.size());
            for (std::size_t c = 0; c < b.size(); ++c) {
                if (x_kills(i, b[c])) continue;
                BasisLabel t = b[c];
                t.alpha[i] += 1;
                const long r = lookup(q, t);
                if (r >= 0) xi.set(static_cast<std::size_t>(r), c, Rational(1));
                else if (t.alpha[i] <= m.window.hi()[i]) throw Error("x-multiplication leaves the module at " + t.to_string());
            }
            m.x[i][s] = std::move(xi);
        }
        if (q == m.p_hi) continue;
        const std::size_t next = m.dim(q + 1);
        SparseMatrixQ zq(next, b.size());
        for (std::size_t c = 0; c < b.size(); ++c) {
            BasisLabel t = b[c];
            t.level = q + 1;
            const long r = lookup(q + 1, t);
            if (r < 0) throw Error("z is not an inclusion at " + b[c].to_string());
            zq.set(static_cast<std::size_t>(r), c, Rational(1));
        }
        m.z[s] = std::move(zq);
        for (std::size_t i = 0; i < n; ++i) {
            SparseMatrixQ th(next, b.size());
            for (std::size_t c = 0; c < b.size(); ++c)
                for (auto [t, v] : theta_terms(i, b[c])) {
                    t.level = q + 1;
                    const long r = lookup(q + 1, t);
                    if (r >= 0) {
                        th.add(static_cast<std::size_t>(r), c, v);
                        continue;
                    }
                    if (!leq(t.alpha, m.window.hi()))
                        continue;  // above the window
                    throw Error("theta leaves the lattice at " + t.to_string());
                }
            m.theta[i][s] = std::move(th);
        }
    }
}

std::string join_indices(const std::vector<std::size_t>& v) {
    std::ostringstream os;
    os << '{';
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i] + 1;
    os << '}';
    return os.str();
}

}  // namespace

std::vector<std::string> ReesRingSpec::generators() const {
    std::vector<std::string> g{"z"};
    for (std::size_t i = 0; i < n_vars; ++i) g.push_back("x" + std::to_string(i + 1));
    for (std::size_t i = 0; i < n_vars; ++i) g.push_back("theta" + std::to_string(i + 1));
    return g;
}

long GradedReesModule::index_of(int q, const BasisLabel& l) const {
    const auto& b = basis_of(q);
    auto it = std::find(b.begin(), b.end(), l);
    return it == b.end() ? -1 : static_cast<long>(it - b.begin());
}

bool GradedReesModule::satisfies_relations() const {
    const std::size_t n = n_vars();
    if (basis.size() != static_cast<std::size_t>(p_hi - p_lo + 1)) return false;
    const Exponent inner = hi_minus(window.hi(), 1);
    for (int q = p_lo; q <= p_hi; ++q) {
        const auto cols = positions(basis_of(q), [&](const BasisLabel& l) { return below(l.alpha, inner); });
        for (std::size_t i = 0; i < n; ++i) {
            const auto& xi = x_of(i, q);
            if (xi.rows() != dim(q) || xi.cols() != dim(q)) return false;
            for (std::size_t j = i + 1; j < n; ++j)
                if (!((xi * x_of(j, q)).select_cols(cols) == (x_of(j, q) * xi).select_cols(cols))) return false;
        }
        if (q == p_hi) continue;
        const auto& zq = z_of(q);
        if (zq.rows() != dim(q + 1) || zq.cols() != dim(q)) return false;
        for (std::size_t i = 0; i < n; ++i) {
            const auto& th = theta_of(i, q);
            if (th.rows() != dim(q + 1) || th.cols() != dim(q)) return false;
            if (!((x_of(i, q + 1) * zq).select_cols(cols) == (zq * x_of(i, q)).select_cols(cols))) return false;
            if (q + 1 < p_hi &&
                !((z_of(q + 1) * th).select_cols(cols) == (theta_of(i, q + 1) * zq).select_cols(cols)))
                return false;
            for (std::size_t j = 0; j < n; ++j) {
                const SparseMatrixQ lhs = (x_of(j, q + 1) * theta_of(i, q) - theta_of(i, q) * x_of(j, q)).select_cols(cols);
                SparseMatrixQ rhs(dim(q + 1), cols.size());
                if (i == j)
                    rhs = ring.is_log_direction(i) ? (x_of(j, q + 1) * zq).select_cols(cols) : zq.select_cols(cols);
                if (!(lhs == rhs)) return false;
                if (j > i && q + 1 < p_hi &&
                    !((theta_of(i, q + 1) * theta_of(j, q)).select_cols(cols) ==
                      (theta_of(j, q + 1) * theta_of(i, q)).select_cols(cols)))
                    return false;
            }
        }
    }
    return true;
}

GradedReesModule rees_of_tower(const LatticeTower& t, const TwistDivisor& delta, const WeightWindow& w, int p_max) {
    const std::size_t n = t.n_vars();
    if (w.n_vars() != n) throw InvalidArgument("window has wrong number of variables");
    if (p_max < 0) throw InvalidArgument("p_max must be >= 0");
    const auto& conn = t.connection();
    GradedReesModule m;
    m.ring = {n, n, ReesFlavor::Log};
    m.window = w;
    m.p_lo = 0;
    m.p_hi = p_max;
    allocate(m);
    for (const auto& blk : conn.blocks()) m.lowering.push_back(blk.phi.pole_divisor());
    for (int q = 0; q <= p_max; ++q) {
        auto& b = m.basis[static_cast<std::size_t>(q)];
        for (std::size_t k = 0; k < conn.blocks().size(); ++k) {
            const Exponent lower = scaled(t.floor_shift(k, q, delta), -1);
            for (std::size_t i = 0; i < n; ++i)
                if (lower[i] < w.lo()[i])
                    throw WindowOverflow("E_" + std::to_string(q) + " of block " + std::to_string(k) +
                                         " needs exponent " + std::to_string(lower[i]) + " below the window " +
                                         w.describe());
            WeightWindow::for_each_in_box(lower, w.hi(), [&](const Exponent& a) {
                for (std::size_t j = 0; j < conn.blocks()[k].rank(); ++j)
                    b.push_back({a, static_cast<int>(k), static_cast<int>(j), 0, {}, q});
            });
        }
    }
    fill_monomial_actions(
        m,
        [&](std::size_t i, const BasisLabel& l) {
            std::vector<std::pair<BasisLabel, Rational>> out{{l, Rational(-1)}};
            const auto& blk = conn.blocks()[static_cast<std::size_t>(l.block)];
            for (const auto& term : blk.nabla_log(i, l.alpha, static_cast<std::size_t>(l.fiber)))
                out.push_back({{term.alpha, l.block, static_cast<int>(term.fiber), 0, {}, l.level}, -term.coeff});
            return out;
        },
        [](std::size_t, const BasisLabel&) { return false; });
    return m;
}

ReesBuilder tower_rees_builder(const LatticeTower& t, const TwistDivisor& delta, int p_max) {
    return [t, delta, p_max](const WeightWindow& w) {
        Exponent need(t.n_vars(), 0);
        for (std::size_t b = 0; b < t.connection().blocks().size(); ++b)
            need = componentwise_min(need, scaled(t.floor_shift(b, p_max, delta), -1));
        return rees_of_tower(t, delta, covering_window(w, need), p_max);
    };
}

GradedReesModule trivial_rees_module(std::size_t n_vars, std::size_t ell, const WeightWindow& w, int p_max) {
    if (w.n_vars() != n_vars) throw InvalidArgument("window has wrong number of variables");
    if (ell > n_vars) throw InvalidArgument("ell exceeds n_vars");
    if (p_max < 0) throw InvalidArgument("p_max must be >= 0");
    GradedReesModule m;
    m.ring = {n_vars, ell, ReesFlavor::Log};
    m.window = w;
    m.p_lo = 0;
    m.p_hi = p_max;
    allocate(m);
    Exponent low(n_vars, 0);
    for (std::size_t i = ell; i < n_vars; ++i) low[i] = 1;
    m.lowering.push_back(low);
    const Exponent zero(n_vars, 0);
    for (int q = 0; q <= p_max; ++q)
        WeightWindow::for_each_in_box(componentwise_max(zero, w.lo()), w.hi(), [&](const Exponent& a) {
            m.basis[static_cast<std::size_t>(q)].push_back({a, 0, 0, 0, {}, q});
        });
    fill_monomial_actions(
        m,
        [&](std::size_t i, const BasisLabel& l) {
            std::vector<std::pair<BasisLabel, Rational>> out;
            if (m.ring.is_log_direction(i)) {
                out.push_back({l, Rational(-(l.alpha[i] + 1))});
            } else if (l.alpha[i] > 0) {
                BasisLabel t = l;
                t.alpha[i] -= 1;
                out.push_back({t, Rational(-l.alpha[i])});
            }
            return out;
        },
        [](std::size_t, const BasisLabel&) { return false; });
    return m;
}

GradedReesModule z_torsion_control(int layers) {
    if (layers < 1) throw InvalidArgument("torsion control needs at least one layer");
    GradedReesModule m;
    m.ring = {1, 1, ReesFlavor::Log};
    m.window = WeightWindow::cube(1, 0, 0);
    m.p_lo = 0;
    m.p_hi = layers + 1;
    allocate(m);
    m.lowering.push_back(Exponent{0});
    for (int q = 0; q < layers; ++q) m.basis[static_cast<std::size_t>(q)].push_back({Exponent{0}, 0, 0, 0, {}, q});
    for (int q = 0; q <= m.p_hi; ++q) {
        const std::size_t s = static_cast<std::size_t>(q);
        m.x[0][s] = SparseMatrixQ(m.dim(q), m.dim(q));
        if (q == m.p_hi) continue;
        SparseMatrixQ zq(m.dim(q + 1), m.dim(q));
        if (m.dim(q) > 0 && m.dim(q + 1) > 0) zq.set(0, 0, Rational(1));
        m.z[s] = zq;
        m.theta[0][s] = SparseMatrixQ(m.dim(q + 1), m.dim(q));
    }
    return m;
}

GradedReesModule with_x1_torsion(GradedReesModule m) {
    const std::size_t n = m.n_vars();
    if (n == 0) throw InvalidArgument("torsion summand needs a coordinate");
    const int tb = static_cast<int>(block_count(m));
    m.lowering.push_back(Exponent(n, 0));
    Exponent lo(n, 0), hi = m.window.hi();
    for (std::size_t i = 1; i < n; ++i) lo[i] = std::max(0, m.window.lo()[i]);
    hi[0] = 0;
    for (int q = m.p_lo; q <= m.p_hi; ++q)
        WeightWindow::for_each_in_box(lo, hi, [&](const Exponent& a) {
            m.basis[static_cast<std::size_t>(q - m.p_lo)].push_back({a, tb, 0, 0, {}, q});
        });
    // Rebuild every action on the enlarged bases: old columns keep their images, the torsion
    // summand gets x_1 = 0 and theta_i = -z(x_i∂_i + 1).
    GradedReesModule old = m;
    allocate(m);
    m.basis = old.basis;
    const std::size_t span = m.basis.size();
    for (std::size_t s = 0; s < span; ++s) {
        const auto& b = m.basis[s];
        std::size_t old_cols = 0;
        for (const auto& l : b)
            if (l.block != tb) ++old_cols;
        for (std::size_t i = 0; i < n; ++i) {
            SparseMatrixQ xi(b.size(), b.size());
            // previous matrix had old_cols columns; its entries carry over unchanged
            for (const auto& [key, v] : old.x[i][s].entries())
                if (key.first < old_cols && key.second < old_cols) xi.set(key.first, key.second, v);
            if (i > 0)
                for (std::size_t c = old_cols; c < b.size(); ++c) {
                    BasisLabel t = b[c];
                    t.alpha[i] += 1;
                    auto it = std::find(b.begin() + static_cast<long>(old_cols), b.end(), t);
                    if (it != b.end()) xi.set(static_cast<std::size_t>(it - b.begin()), c, Rational(1));
                }
            m.x[i][s] = std::move(xi);
        }
        if (s + 1 == span) continue;
        const auto& nb = m.basis[s + 1];
        std::size_t next_old = 0;
        for (const auto& l : nb)
            if (l.block != tb) ++next_old;
        SparseMatrixQ zq(nb.size(), b.size());
        for (const auto& [key, v] : old.z[s].entries())
            if (key.first < next_old && key.second < old_cols) zq.set(key.first, key.second, v);
        for (std::size_t c = old_cols; c < b.size(); ++c) zq.set(next_old + (c - old_cols), c, Rational(1));
        m.z[s] = zq;
        for (std::size_t i = 0; i < n; ++i) {
            SparseMatrixQ th(nb.size(), b.size());
            for (const auto& [key, v] : old.theta[i][s].entries())
                if (key.first < next_old && key.second < old_cols) th.set(key.first, key.second, v);
            for (std::size_t c = old_cols; c < b.size(); ++c)
                th.set(next_old + (c - old_cols), c, Rational(-(b[c].alpha[i] + 1)));
            m.theta[i][s] = std::move(th);
        }
    }
    return m;
}

bool TorsionReport::strict() const {
    return std::all_of(kernel.begin(), kernel.end(), [](std::size_t k) { return k == 0; });
}

TorsionReport strictness_check(const GradedReesModule& m) {
    TorsionReport r;
    const int cap = m.p_hi - m.p_lo;
    for (int q = m.p_lo; q < m.p_hi; ++q) {
        r.kernel.push_back(m.dim(q) - rank_q(m.z_of(q)));
        std::size_t prev = 0;
        for (int l = 1; q + l <= m.p_hi; ++l) {
            const std::size_t k = m.dim(q) - rank_q(z_power(m, q, l));
            if (k > prev) {
                r.length = std::max(r.length, l);
                if (l == cap) r.cap_binds = true;
            }
            prev = k;
        }
    }
    return r;
}

bool regular_sequence_check(const GradedReesModule& m, const std::vector<std::size_t>& I) {
    for (auto i : I)
        if (i >= m.ring.ell) throw InvalidArgument("regular sequence index outside the boundary branches");
    if (I.empty()) return true;
    const Exponent inner = hi_minus(m.window.hi(), 1);
    for (int q = m.p_lo; q <= m.p_hi; ++q) {
        const auto& b = m.basis_of(q);
        if (b.empty()) continue;
        const auto band = positions(b, [&](const BasisLabel& l) { return below(l.alpha, inner); });
        SparseMatrixQ j(b.size(), 0);
        for (std::size_t k = 0; k < I.size(); ++k) {
            const SparseMatrixQ xb = m.x_of(I[k], q).select_cols(band);
            std::size_t kernel;
            if (j.cols() == 0) {
                kernel = band.size() - rank_q(xb);
            } else {
                kernel = rank_q(unit_columns(b.size(), band).hconcat(j)) - rank_q(xb.hconcat(j));
            }
            if (kernel != 0) return false;
            j = j.cols() == 0 ? m.x_of(I[k], q) : j.hconcat(m.x_of(I[k], q));
        }
    }
    return true;
}

bool all_subsets_regular(const GradedReesModule& m) {
    const std::size_t ell = m.ring.ell;
    for (unsigned s = 1; s < (1u << ell); ++s) {
        std::vector<std::size_t> I;
        for (std::size_t i = 0; i < ell; ++i)
            if (s & (1u << i)) I.push_back(i);
        do {
            if (!regular_sequence_check(m, I)) return false;
        } while (std::next_permutation(I.begin(), I.end()));
    }
    return true;
}

bool quotient_strict(const GradedReesModule& m, const std::vector<std::size_t>& I) {
    const Exponent inner = hi_minus(m.window.hi(), 1);
    const auto span_x = [&](int q) {
        SparseMatrixQ j(m.dim(q), 0);
        for (auto i : I) j = j.hconcat(m.x_of(i, q));
        return j;
    };
    for (int q = m.p_lo; q < m.p_hi; ++q) {
        const auto band = positions(m.basis_of(q), [&](const BasisLabel& l) { return below(l.alpha, inner); });
        const SparseMatrixQ xq = span_x(q), xn = span_x(q + 1);
        const SparseMatrixQ zb = m.z_of(q).select_cols(band);
        // dim{v ∈ band : zv ∈ Σ x_i Ñ} - dim(band ∩ Σ x_i Ñ)
        const std::size_t pre = band.size() - rank_q(zb.hconcat(xn)) + rank_q(xn);
        const std::size_t meet = band.size() + rank_q(xq) - rank_q(unit_columns(m.dim(q), band).hconcat(xq));
        if (pre != meet) return false;
    }
    return true;
}

namespace {

// All a ∈ ℕ^n with |a| = total.
std::vector<Exponent> compositions(std::size_t n, int total) {
    std::vector<Exponent> out;
    if (total < 0) return out;
    if (n == 0) {
        if (total == 0) out.push_back({});
        return out;
    }
    Exponent a(n, 0);
    std::function<void(std::size_t, int)> rec = [&](std::size_t i, int left) {
        if (i + 1 == n) {
            a[i] = left;
            out.push_back(a);
            return;
        }
        for (int v = left; v >= 0; --v) {
            a[i] = v;
            rec(i + 1, left - v);
        }
    };
    rec(0, total);
    return out;
}

// Shared assembly of the two Koszul complexes. `with_theta` adds the Spencer part of δ_triv;
// cut(block, |S|) bounds exponents; terms(q, S, a) says which (q, a) occur.
KoszulComplex assemble_koszul(const GradedReesModule& m, int p, bool with_theta,
                              const std::function<std::vector<std::pair<int, Exponent>>(std::size_t)>& shapes,
                              const std::function<Exponent(int, std::size_t)>& cut,
                              std::function<bool(int, const BasisLabel&)> in_band) {
    const std::size_t n = m.n_vars();
    const int top = 0, bottom = -static_cast<int>(n);
    KoszulComplex kc{FiniteComplex(bottom, top), p, {}};
    std::map<int, std::vector<std::vector<Column>>> xc, tc;
    for (int q = m.p_lo; q <= m.p_hi; ++q) {
        auto& xv = xc[q];
        auto& tv = tc[q];
        for (std::size_t i = 0; i < n; ++i) {
            xv.push_back(columns_of(m.x_of(i, q)));
            if (q < m.p_hi) tv.push_back(columns_of(m.theta_of(i, q)));
        }
    }
    for (int d = bottom; d <= top; ++d) {
        const std::size_t k = static_cast<std::size_t>(-d);
        std::vector<BasisLabel> basis;
        for (unsigned s = 0; s < (1u << n); ++s) {
            if (static_cast<std::size_t>(std::popcount(s)) != k) continue;
            for (const auto& [q, a] : shapes(k)) {
                if (q < m.p_lo || q > m.p_hi) continue;
                for (const auto& l : m.basis_of(q)) {
                    if (!leq(l.alpha, cut(l.block, k))) continue;
                    basis.push_back({l.alpha, l.block, l.fiber, s, a, q});
                }
            }
        }
        kc.complex.set_basis(d, std::move(basis));
    }
    std::map<int, std::map<BasisLabel, std::size_t>> midx;
    for (int q = m.p_lo; q <= m.p_hi; ++q) midx[q] = index_map(m.basis_of(q));
    for (int d = bottom; d < top; ++d) {
        const auto& src = kc.complex.basis(d);
        SparseMatrixQ dm(kc.complex.dim(d + 1), src.size());
        const std::size_t k_tgt = static_cast<std::size_t>(-(d + 1));
        const auto place = [&](std::size_t col, BasisLabel t, const Rational& v) {
            const long row = kc.complex.index_of(d + 1, t);
            if (row >= 0) {
                dm.add(static_cast<std::size_t>(row), col, v);
                return;
            }
            if (!leq(t.alpha, cut(t.block, k_tgt))) return;  // above the cut
            throw Error("Koszul differential leaves the complex at " + t.to_string());
        };
        for (std::size_t col = 0; col < src.size(); ++col) {
            const BasisLabel& l = src[col];
            const std::size_t mi = midx[l.level].at(bare(l));
            int pos = 0;
            for (std::size_t s = 0; s < n; ++s) {
                if (!(l.frame & (1u << s))) continue;
                const Rational sign = (pos % 2 == 0) ? 1 : -1;
                ++pos;
                const unsigned rest = l.frame & ~(1u << s);
                if (with_theta)
                    for (const auto& [r, v] : tc.at(l.level)[s][mi]) {
                        const BasisLabel& tl = m.basis_of(l.level + 1)[r];
                        place(col, {tl.alpha, tl.block, tl.fiber, rest, l.ops, l.level + 1}, sign * v);
                    }
                const Exponent a1 = exp_add(l.ops, unit(n, s));
                if (m.ring.is_log_direction(s)) {
                    const auto& xs = xc.at(l.level)[s][mi];
                    for (const auto& [r, v] : xs) {
                        const BasisLabel& tl = m.basis_of(l.level)[r];
                        place(col, {tl.alpha, tl.block, tl.fiber, rest, a1, l.level}, -sign * v);
                    }
                } else {
                    place(col, {l.alpha, l.block, l.fiber, rest, a1, l.level}, -sign);
                }
            }
        }
        kc.complex.set_differential(d, std::move(dm));
    }
    kc.complex.set_differential(top, SparseMatrixQ(0, kc.complex.dim(top)));
    kc.in_band = std::move(in_band);
    return kc;
}

// α - a in log directions, α elsewhere; δ never raises it and the graded differential keeps it.
Exponent koszul_weight(const GradedReesModule& m, const BasisLabel& l) {
    Exponent w = l.alpha;
    for (std::size_t i = 0; i < w.size(); ++i)
        if (m.ring.is_log_direction(i)) w[i] -= l.ops[i];
    return w;
}

Exponent block_lowering(const GradedReesModule& m, int b) {
    if (static_cast<std::size_t>(b) < m.lowering.size()) return m.lowering[static_cast<std::size_t>(b)];
    return Exponent(m.n_vars(), 0);
}

}  // namespace

KoszulComplex koszul_tensor_complex(const GradedReesModule& m, int p) {
    const std::size_t n = m.n_vars();
    if (p < m.p_lo || p > m.p_hi) throw InvalidArgument("Koszul degree outside the module's degree range");
    const auto shapes = [&](std::size_t k) {
        std::vector<std::pair<int, Exponent>> out;
        for (int q = m.p_lo; q <= p - static_cast<int>(k); ++q)
            for (auto& a : compositions(n, p - q - static_cast<int>(k))) out.push_back({q, a});
        return out;
    };
    const auto cut = [&](int b, std::size_t k) {
        return exp_sub(m.window.hi(), scaled(block_lowering(m, b), static_cast<int>(n - k)));
    };
    // A class can be moved up along (α, a) ~ (α + e_s, a + e_s) at most p times before it meets the cut.
    const auto in_band = [&m, n, p](int d, const BasisLabel& l) {
        const Exponent low = block_lowering(m, l.block);
        Exponent c = exp_sub(m.window.hi(), scaled(low, static_cast<int>(n) + d));
        for (std::size_t i = 0; i < n; ++i) c[i] -= low[i] + 1 + p;
        return leq(l.alpha, c);
    };
    return assemble_koszul(m, p, true, shapes, cut, in_band);
}

DimensionMap koszul_cohomology(const GradedReesModule& m, int p) {
    const KoszulComplex kc = koszul_tensor_complex(m, p);
    return band_cohomology(kc.complex, kc.in_band);
}

KoszulComplex gr_koszul_complex(const GradedReesModule& m, int q, int r) {
    const std::size_t n = m.n_vars();
    if (q < m.p_lo || q > m.p_hi) throw InvalidArgument("graded piece outside the module's degree range");
    const auto shapes = [&](std::size_t k) {
        std::vector<std::pair<int, Exponent>> out;
        for (auto& a : compositions(n, r - static_cast<int>(k))) out.push_back({q, a});
        return out;
    };
    const auto cut = [&](int, std::size_t) { return m.window.hi(); };
    // whole weight pieces below hi - r lie inside the window and split off as summands
    const Exponent top = hi_minus(m.window.hi(), r);
    const auto in_band = [&m, top](int, const BasisLabel& l) { return leq(koszul_weight(m, l), top); };
    return assemble_koszul(m, r, false, shapes, cut, in_band);
}

std::size_t gr_h0_z_kernel(const GradedReesModule& m, int q, int r) {
    if (q < m.p_lo || q >= m.p_hi) throw InvalidArgument("graded piece outside the module's degree range");
    const KoszulComplex a = gr_koszul_complex(m, q, r);
    const KoszulComplex b = gr_koszul_complex(m, q + 1, r);
    const auto& c0 = a.complex.basis(0);
    const auto& c1 = b.complex.basis(0);
    const auto band0 = positions(c0, [&](const BasisLabel& l) { return a.in_band(0, l); });
    const auto band1 = positions(c1, [&](const BasisLabel& l) { return b.in_band(0, l); });
    SparseMatrixQ zmap(c1.size(), c0.size());
    for (std::size_t c = 0; c < c0.size(); ++c) {
        const BasisLabel& l = c0[c];
        const long mi = m.index_of(l.level, bare(l));
        for (const auto& [key, v] : m.z_of(l.level).entries()) {
            if (static_cast<long>(key.second) != mi) continue;
            const BasisLabel& tl = m.basis_of(l.level + 1)[key.first];
            const long row = b.complex.index_of(0, {tl.alpha, tl.block, tl.fiber, l.frame, l.ops, l.level + 1});
            if (row >= 0) zmap.add(static_cast<std::size_t>(row), c, v);
        }
    }
    const std::size_t n = m.n_vars();
    SparseMatrixQ b0(band0.size(), 0), b1(band1.size(), 0);
    if (n > 0) {
        b0 = a.complex.differential(-1).select_rows(band0);
        b1 = b.complex.differential(-1).select_rows(band1);
    }
    const SparseMatrixQ zb = zmap.select_cols(band0).select_rows(band1);
    // dim {v : zv ∈ im} - dim im, on the band
    return band0.size() - rank_q(zb.hconcat(b1)) + rank_q(b1) - rank_q(b0);
}

CheckReport gr_koszul_acyclicity(const ReesBuilder& build, const WeightWindow& w, int r_max) {
    CheckReport rep{"gr_koszul", {}};
    std::map<std::pair<int, int>, std::vector<DimensionMap>> dims;
    for (const auto& win : stabilization_windows(w)) {
        const GradedReesModule m = build(win);
        for (int q = m.p_lo; q <= m.p_hi; ++q)
            for (int r = 0; r <= r_max; ++r) {
                const KoszulComplex kc = gr_koszul_complex(m, q, r);
                dims[{q, r}].push_back(band_cohomology(kc.complex, kc.in_band));
            }
    }
    for (const auto& [key, ds] : dims) {
        CheckEntry e{"q=" + std::to_string(key.first) + " r=" + std::to_string(key.second), ds.front(), true, true, ""};
        // H⁰ is infinite dimensional and grows with the window; only negative degrees must agree
        e.stable = std::all_of(ds.begin(), ds.end(), [&](DimensionMap d) {
            DimensionMap f = ds.front();
            d.erase(0);
            f.erase(0);
            return d == f;
        });
        bool negative_zero = true;
        for (const auto& [deg, v] : ds.front())
            if (deg < 0 && v != 0) negative_zero = false;
        e.pass = e.stable && negative_zero;
        if (!negative_zero) e.detail = "negative cohomology";
        else if (!e.stable) e.detail = "not stable under enlargement";
        rep.entries.push_back(std::move(e));
    }
    return rep;
}

CheckReport prop_b4_pipeline(const ReesBuilder& build, const WeightWindow& w, int p_max) {
    CheckReport rep{"rees", {}};
    const auto windows = stabilization_windows(w);
    std::vector<GradedReesModule> mods;
    for (const auto& win : windows) mods.push_back(build(win));
    const GradedReesModule& m0 = mods.front();

    CheckEntry rel{"relations", {}, true, true, ""};
    for (const auto& m : mods) rel.pass = rel.pass && m.satisfies_relations();
    if (!rel.pass) rel.detail = "Rees relations fail on the interior";
    rep.entries.push_back(rel);

    CheckEntry st{"strict", {}, true, true, ""};
    std::vector<TorsionReport> trs;
    for (const auto& m : mods) trs.push_back(strictness_check(m));
    for (std::size_t q = 0; q < trs.front().kernel.size(); ++q) st.dims[m0.p_lo + static_cast<int>(q)] = trs.front().kernel[q];
    st.stable = std::all_of(trs.begin(), trs.end(), [&](const TorsionReport& t) { return t.kernel == trs.front().kernel; });
    st.pass = st.stable && trs.front().strict();
    if (!trs.front().strict()) st.detail = "z-torsion of length " + std::to_string(trs.front().length);
    rep.entries.push_back(st);

    const std::size_t ell = m0.ring.ell;
    for (unsigned s = 1; s < (1u << ell); ++s) {
        std::vector<std::size_t> I;
        for (std::size_t i = 0; i < ell; ++i)
            if (s & (1u << i)) I.push_back(i);
        CheckEntry e{"regular " + join_indices(I), {}, true, true, ""};
        for (const auto& m : mods) {
            std::vector<std::size_t> order = I;
            do {
                e.pass = e.pass && regular_sequence_check(m, order);
            } while (std::next_permutation(order.begin(), order.end()));
        }
        if (!e.pass) e.detail = "not a regular sequence";
        rep.entries.push_back(e);
    }

    const int top = std::min(p_max, m0.p_hi - 1);
    for (int p = m0.p_lo; p <= top; ++p) {
        std::vector<DimensionMap> ks;
        for (const auto& m : mods) ks.push_back(koszul_cohomology(m, p));
        CheckEntry e{"koszul p=" + std::to_string(p), ks.front(), true, true, ""};
        e.stable = std::all_of(ks.begin(), ks.end(), [&](DimensionMap a) {
            DimensionMap b = ks.front();
            a.erase(0);
            b.erase(0);
            return a == b;
        });
        bool negative_zero = true;
        for (const auto& [deg, v] : ks.front())
            if (deg < 0 && v != 0) negative_zero = false;
        e.pass = e.stable && negative_zero;
        if (!negative_zero) e.detail = "negative cohomology";
        else if (!e.stable) e.detail = "not stable under enlargement";
        rep.entries.push_back(std::move(e));
    }
    CheckEntry qs{"quotients strict", {}, true, true, ""};
    bool hypothesis = true;
    for (unsigned s = 1; s < (1u << ell); ++s) {
        std::vector<std::size_t> I;
        for (std::size_t i = 0; i < ell; ++i)
            if (s & (1u << i)) I.push_back(i);
        const bool ok = quotient_strict(m0, I);
        qs.dims[static_cast<int>(s)] = ok ? 0 : 1;
        hypothesis = hypothesis && ok;
    }
    // optional hypothesis: only when it holds must gr H⁰ be strict
    if (!hypothesis) qs.detail = "some quotient has z-torsion; gr H0 strictness not required";
    rep.entries.push_back(qs);
    for (int q = m0.p_lo; hypothesis && q < m0.p_hi; ++q)
        for (int r = 0; r <= 2; ++r) {
            CheckEntry e{"gr strict q=" + std::to_string(q) + " r=" + std::to_string(r), {}, true, true, ""};
            std::vector<std::size_t> ks;
            for (const auto& m : mods) ks.push_back(gr_h0_z_kernel(m, q, r));
            e.dims[0] = ks.front();
            e.stable = std::all_of(ks.begin(), ks.end(), [&](std::size_t k) { return k == ks.front(); });
            e.pass = ks.front() == 0 && e.stable;
            if (ks.front() != 0) e.detail = "z-kernel " + std::to_string(ks.front()) + " on H0";
            rep.entries.push_back(std::move(e));
        }
    for (auto& e : gr_koszul_acyclicity(build, w, 2).entries) {
        e.label = "gr " + e.label;
        rep.entries.push_back(std::move(e));
    }
    return rep;
}

namespace {

using Laurent = std::map<BasisLabel, Rational>;

// ∂_i applied to a Laurent vector of one connection (labels carry alpha, block, fiber).
Laurent apply_partial(const FormalConnection& c, const Laurent& v, std::size_t i) {
    Laurent out;
    for (const auto& [l, coeff] : v) {
        const auto& blk = c.blocks()[static_cast<std::size_t>(l.block)];
        for (const auto& t : blk.nabla_log(i, l.alpha, static_cast<std::size_t>(l.fiber))) {
            Exponent a = t.alpha;
            a[i] -= 1;
            BasisLabel key{a, l.block, static_cast<int>(t.fiber), 0, {}, 0};
            Rational& slot = out[key];
            slot += coeff * t.coeff;
            if (slot == 0) out.erase(key);
        }
    }
    return out;
}

Laurent apply_partials(const FormalConnection& c, Laurent v, const Exponent& a) {
    for (std::size_t i = 0; i < a.size(); ++i)
        for (int k = 0; k < a[i]; ++k) v = apply_partial(c, v, i);
    return v;
}

// Pole-raising step of ∂_i on a block: m + e_i when φ has a pole along x_i, else e_i.
Exponent pole_step(const ElementaryModel& blk, std::size_t i) {
    const Exponent m = blk.phi.pole_divisor();
    Exponent s = m[i] > 0 ? m : Exponent(m.size(), 0);
    s[i] += 1;
    return s;
}

// Exponents of the predicted staircase Σ_{|a| ≤ k} ∂^a (x^{-floor}O) of one block, below `upper`.
std::set<Exponent> staircase(const ElementaryModel& blk, const Exponent& floor, int k, const Exponent& upper) {
    std::set<Exponent> out;
    const std::size_t n = floor.size();
    for (int j = 0; j <= k; ++j)
        for (const auto& a : compositions(n, j)) {
            Exponent pole = floor;
            for (std::size_t i = 0; i < n; ++i) pole = exp_add(pole, scaled(pole_step(blk, i), a[i]));
            WeightWindow::for_each_in_box(scaled(pole, -1), upper, [&](const Exponent& e) { out.insert(e); });
        }
    return out;
}

// Columns of Laurent vectors as a sparse matrix over a shared row index.
struct LaurentMatrix {
    std::map<BasisLabel, std::size_t> rows;
    std::vector<Laurent> cols;

    SparseMatrixQ matrix(const std::function<bool(const BasisLabel&)>& keep_row) {
        for (const auto& c : cols)
            for (const auto& [l, v] : c)
                if (keep_row(l) && !rows.count(l)) {
                    rows.emplace(l, rows.size());
                }
        SparseMatrixQ m(rows.size(), cols.size());
        for (std::size_t j = 0; j < cols.size(); ++j)
            for (const auto& [l, v] : cols[j])
                if (keep_row(l)) m.set(rows.at(l), j, v);
        return m;
    }
};

}  // namespace

CheckReport tensor_image_check(const LatticeTower& t, const WeightWindow& w, int p_max) {
    CheckReport rep{"tensor_image", {}};
    const auto& conn = t.connection();
    const std::size_t n = t.n_vars();
    const TwistDivisor dtw = TwistDivisor::multiple(n, 1);
    Exponent need(n, 0);
    for (std::size_t b = 0; b < conn.blocks().size(); ++b)
        need = componentwise_min(need, scaled(t.floor_shift(b, p_max + 1, dtw), -1));
    const WeightWindow win = covering_window(w, need);
    const GradedReesModule m = rees_of_tower(t, dtw, win, p_max + 1);
    for (int p = 0; p <= p_max; ++p) {
        const KoszulComplex kc = koszul_tensor_complex(m, p);
        const auto& c0 = kc.complex.basis(0);
        LaurentMatrix mu;
        for (const auto& l : c0) {
            Laurent v{{BasisLabel{l.alpha, l.block, l.fiber, 0, {}, 0}, Rational(1)}};
            v = apply_partials(conn, v, l.ops);
            int order = 0;
            for (int a : l.ops) order += a;
            if (order % 2 != 0)
                for (auto& [key, c] : v) c = -c;
            mu.cols.push_back(std::move(v));
        }
        CheckEntry e{"p=" + std::to_string(p), {}, true, true, ""};
        std::ostringstream why;

        // μ∘δ = 0 on interior columns of degree -1
        if (n > 0) {
            const auto& d = kc.complex.differential(-1);
            const auto& cm1 = kc.complex.basis(-1);
            std::vector<Laurent> image(cm1.size());
            for (const auto& [key, v] : d.entries())
                for (const auto& [l, c] : mu.cols[key.first]) {
                    Rational& slot = image[key.second][l];
                    slot += v * c;
                }
            for (std::size_t j = 0; j < cm1.size(); ++j) {
                if (!kc.in_band(-1, cm1[j])) continue;
                for (const auto& [l, c] : image[j])
                    if (c != 0) {
                        e.pass = false;
                        why << "map does not kill the boundary of " << cm1[j].to_string() << "; ";
                        break;
                    }
                if (!e.pass) break;
            }
        }

        // image = predicted staircase on the target band, with containment
        std::size_t predicted = 0;
        std::vector<Exponent> target_hi(conn.blocks().size());
        std::vector<std::set<Exponent>> stairs(conn.blocks().size());
        for (std::size_t b = 0; b < conn.blocks().size(); ++b) {
            const auto& blk = conn.blocks()[b];
            const Exponent mb = blk.phi.pole_divisor();
            Exponent hi = exp_sub(win.hi(), scaled(mb, static_cast<int>(n)));
            for (std::size_t i = 0; i < n; ++i) hi[i] -= p * (mb[i] + 1);
            target_hi[b] = hi;
            std::set<Exponent> all;
            for (int k = 0; k <= p; ++k) {
                auto s = staircase(blk, t.floor_shift(b, k, dtw), p - k, win.hi());
                all.insert(s.begin(), s.end());
            }
            stairs[b] = std::move(all);
            for (const auto& a : stairs[b])
                if (leq(a, hi)) predicted += blk.rank();
        }
        for (const auto& col : mu.cols)
            for (const auto& [l, c] : col)
                if (!stairs[static_cast<std::size_t>(l.block)].count(l.alpha) && leq(l.alpha, win.hi())) {
                    e.pass = false;
                    why << "image term " << l.to_string() << " outside the predicted filtration; ";
                    break;
                }
        const auto in_target = [&](const BasisLabel& l) { return leq(l.alpha, target_hi[static_cast<std::size_t>(l.block)]); };
        const std::size_t rank = rank_q(mu.matrix(in_target));
        e.dims[0] = predicted;
        e.dims[1] = rank;
        if (rank != predicted) {
            e.pass = false;
            why << "image rank " << rank << " vs predicted " << predicted << "; ";
        }

        // weight ≤ w is a subcomplex lying wholly inside the window; μ must be injective on its H⁰
        const auto in_w = [&](const BasisLabel& l) {
            Exponent top = exp_sub(win.hi(), scaled(block_lowering(m, l.block), static_cast<int>(n)));
            for (auto& v : top) v -= p;
            return leq(koszul_weight(m, l), top);
        };
        const auto w0 = positions(c0, in_w);
        std::size_t boundaries = 0;
        if (n > 0) {
            const auto wm1 = positions(kc.complex.basis(-1), in_w);
            boundaries = rank_q(kc.complex.differential(-1).select_cols(wm1).select_rows(w0));
        }
        LaurentMatrix muw;
        for (auto j : w0) muw.cols.push_back(mu.cols[j]);
        const std::size_t rw = rank_q(muw.matrix([](const BasisLabel&) { return true; }));
        e.dims[2] = w0.size() - boundaries;
        e.dims[3] = rw;
        if (e.dims[2] != rw) {
            e.pass = false;
            why << "H0 " << e.dims[2] << " vs image " << rw << "; ";
        }
        e.detail = why.str();
        rep.entries.push_back(std::move(e));
    }
    return rep;
}

EulerReport euler_bijectivity(const FormalConnection& c, const std::vector<std::size_t>& I, std::size_t j,
                              int k_max, const WeightWindow& w) {
    const std::size_t n = c.n_vars();
    if (w.n_vars() != n) throw InvalidArgument("window has wrong number of variables");
    if (std::find(I.begin(), I.end(), j) == I.end()) throw InvalidArgument("j must belong to I");
    for (auto i : I)
        if (i >= n) throw InvalidArgument("branch index out of range");
    EulerReport rep;
    for (std::size_t b = 0; b < c.blocks().size(); ++b) {
        const auto& blk = c.blocks()[b];
        const Exponent m = blk.phi.pole_divisor();
        if (std::any_of(I.begin(), I.end(), [&](std::size_t i) { return m[i] > 0; })) continue;  // restriction is zero
        Exponent lo(n), hi = w.hi();
        for (std::size_t i = 0; i < n; ++i) lo[i] = m[i] > 0 ? w.lo()[i] : -1;
        for (auto i : I) hi[i] = -1;
        const std::size_t r = blk.rank();
        WeightWindow::for_each_in_box(lo, hi, [&](const Exponent& a) {
            for (int k = 1; k <= k_max; ++k) {
                // Eu_j + k = -(∇_{x_j∂_j} + 1) + k on the fibre over x^a
                SparseMatrixQ mat(r, r);
                for (std::size_t f = 0; f < r; ++f) {
                    mat.add(f, f, Rational(k - 1));
                    for (const auto& t : blk.nabla_log(j, a, f))
                        if (t.alpha == a) mat.add(t.fiber, f, -t.coeff);
                }
                if (rank_q(mat) != r) {
                    rep.bijective = false;
                    rep.failures.push_back("j=" + std::to_string(j + 1) + " k=" + std::to_string(k) +
                                           " alpha=" + to_string(a) + " block=" + std::to_string(b));
                }
            }
        });
    }
    return rep;
}

CheckReport localization_check(const FormalConnection& c, const WeightWindow& w, int k_max) {
    CheckReport rep{"localization", {}};
    const std::size_t n = c.n_vars();
    if (w.n_vars() != n) throw InvalidArgument("window has wrong number of variables");
    const LatticeTower t0 = closed_form_tower(c, 0);
    const TwistDivisor dtw = TwistDivisor::multiple(n, 1);
    for (std::size_t b = 0; b < c.blocks().size(); ++b) {
        const auto& blk = c.blocks()[b];
        const Exponent mb = blk.phi.pole_divisor();
        const Exponent floor0 = t0.floor_shift(b, 0, dtw);
        Exponent deepest = floor0;
        for (std::size_t i = 0; i < n; ++i) deepest = exp_add(deepest, scaled(pole_step(blk, i), k_max));
        const WeightWindow win = covering_window(w, scaled(deepest, -1));
        for (int k = 1; k <= k_max; ++k) {
            LaurentMatrix gens;
            WeightWindow::for_each_in_box(scaled(floor0, -1), win.hi(), [&](const Exponent& a) {
                for (std::size_t f = 0; f < blk.rank(); ++f)
                    for (int j = 0; j <= k; ++j)
                        for (const auto& ops : compositions(n, j)) {
                            // the block is treated as its own connection
                            Laurent v{{BasisLabel{a, static_cast<int>(b), static_cast<int>(f), 0, {}, 0}, Rational(1)}};
                            gens.cols.push_back(apply_partials(c, v, ops));
                        }
            });
            Exponent band = win.hi();
            for (std::size_t i = 0; i < n; ++i) band[i] -= k * (mb[i] + 1);
            const auto stair = staircase(blk, floor0, k, win.hi());
            std::size_t predicted = 0;
            for (const auto& a : stair)
                if (leq(a, band)) predicted += blk.rank();
            CheckEntry e{"block " + std::to_string(b) + " k=" + std::to_string(k), {}, true, true, ""};
            for (const auto& col : gens.cols)
                for (const auto& [l, v] : col)
                    if (!stair.count(l.alpha)) {
                        e.pass = false;
                        e.detail = "term " + l.to_string() + " outside the predicted staircase";
                    }
            const std::size_t rank = rank_q(gens.matrix([&](const BasisLabel& l) { return leq(l.alpha, band); }));
            e.dims[0] = predicted;
            e.dims[1] = rank;
            if (rank != predicted) {
                e.pass = false;
                e.detail += " rank " + std::to_string(rank) + " vs predicted " + std::to_string(predicted);
            }
            if (n == 1) e.detail += (e.detail.empty() ? "" : " ") + std::string("pole ") +
                                    std::to_string(floor0[0] + k * (mb[0] + 1));
            rep.entries.push_back(std::move(e));
        }
        // ∂_j^k : N/Nx_j → Nx_j^{-k}/Nx_j^{-k+1} along directions without pole
        for (std::size_t j = 0; j < n; ++j) {
            if (mb[j] > 0) continue;
            Exponent lo(n), hi = w.hi();
            for (std::size_t i = 0; i < n; ++i) lo[i] = mb[i] > 0 ? w.lo()[i] : -floor0[i];
            lo[j] = hi[j] = -floor0[j];
            for (int k = 1; k <= k_max; ++k) {
                CheckEntry e{"block " + std::to_string(b) + " dlog j=" + std::to_string(j + 1) + " k=" +
                                 std::to_string(k),
                             {}, true, true, ""};
                std::size_t bad = 0, bands = 0;
                WeightWindow::for_each_in_box(lo, hi, [&](const Exponent& a) {
                    const std::size_t r = blk.rank();
                    SparseMatrixQ mat(r, r);
                    Exponent target = a;
                    target[j] -= k;
                    for (std::size_t f = 0; f < r; ++f) {
                        Laurent v{{BasisLabel{a, static_cast<int>(b), static_cast<int>(f), 0, {}, 0}, Rational(1)}};
                        Exponent ops(n, 0);
                        ops[j] = k;
                        for (const auto& [l, coeff] : apply_partials(c, v, ops))
                            if (l.alpha == target) mat.add(static_cast<std::size_t>(l.fiber), f, k % 2 ? -coeff : coeff);
                    }
                    ++bands;
                    if (rank_q(mat) != r) ++bad;
                });
                e.dims[0] = bands;
                e.dims[1] = bad;
                e.pass = bad == 0;
                if (bad) e.detail = std::to_string(bad) + " singular bands";
                rep.entries.push_back(std::move(e));
            }
        }
    }
    return rep;
}

bool TorsionCancellation::cancels() const {
    return std::all_of(layers.begin(), layers.end(), [](const auto& l) { return l.first == l.second; });
}

TorsionCancellation k0_torsion_cancellation(const GradedReesModule& m) {
    TorsionCancellation out;
    const TorsionReport tr = strictness_check(m);
    out.cap_binds = tr.cap_binds;
    if (tr.length == 0) return out;
    // kernels[q][l] = basis of ker z^l on degree q (l = 0 gives zero)
    std::map<int, std::vector<SparseMatrixQ>> kernels;
    for (int q = m.p_lo; q <= m.p_hi; ++q) {
        auto& ks = kernels[q];
        ks.push_back(SparseMatrixQ(m.dim(q), 0));
        for (int l = 1; q + l <= m.p_hi; ++l) ks.push_back(nullspace(z_power(m, q, l)));
    }
    const auto kdim = [&](int q, int l) -> std::size_t {
        const auto& ks = kernels.at(q);
        if (l < static_cast<int>(ks.size())) return ks[static_cast<std::size_t>(l)].cols();
        return ks.back().cols();
    };
    for (int l = 1; l <= tr.length; ++l) {
        std::size_t ker = 0, coker = 0;
        std::map<int, std::size_t> into;  // rank of z̄ landing in degree q
        for (int q = m.p_lo; q <= m.p_hi; ++q) {
            const std::size_t dim_l = kdim(q, l) - kdim(q, l - 1);
            std::size_t rk = 0;
            if (q < m.p_hi && dim_l > 0 && l < static_cast<int>(kernels.at(q).size())) {
                const SparseMatrixQ img = m.z_of(q) * kernels.at(q)[static_cast<std::size_t>(l)];
                const SparseMatrixQ lower = kernels.at(q + 1)[static_cast<std::size_t>(std::min<int>(
                    l - 1, static_cast<int>(kernels.at(q + 1).size()) - 1))];
                rk = rank_q(img.hconcat(lower)) - rank_q(lower);
            }
            ker += dim_l - rk;
            into[q + 1] = rk;
        }
        for (int q = m.p_lo; q <= m.p_hi; ++q) coker += (kdim(q, l) - kdim(q, l - 1)) - into[q];
        out.layers.push_back({ker, coker});
    }
    return out;
}

}  // namespace loglattice
