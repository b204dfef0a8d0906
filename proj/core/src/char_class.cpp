#include "loglattice/char_class.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <tuple>

#include "loglattice/errors.hpp"
#include "loglattice/lattice_tower.hpp"
#include "loglattice/one_variable.hpp"
#include "loglattice/sparse_matrix.hpp"

namespace loglattice {

namespace {

const P1Point ZERO = P1Point::at(0);
const P1Point INF = P1Point::at_infinity();

int twist_at(const TwistDivisor& delta, const BoundaryDivisor& d, const P1Point& p) {
    const long i = d.index_of(p);
    if (i < 0 || delta.size() == 0) return 0;
    if (delta.size() != d.size()) throw InvalidArgument("twist divisor does not match the boundary");
    return delta[static_cast<std::size_t>(i)];
}

// Model pole orders of the local tower of one summand at p, levels 0..depth.
std::vector<int> local_shifts(const RankOneForm& omega, const P1Point& p, int depth) {
    const LocalType lt = local_formal_type(omega, p);
    const LatticeTower t = tower(FormalConnection(1, {lt.model()}), depth);
    std::vector<int> out;
    for (int i = 0; i <= depth; ++i) out.push_back(t.floor_shift(0, i, TwistDivisor({0}))[0]);
    return out;
}

// x^a ↦ Σ terms: an operator on Laurent polynomials of a free module of rank `rank`,
// with every term of x^a e_j at exponents in [a + kmin, a + kmax].
struct LaurentOp {
    std::function<std::vector<ElementaryModel::Term>(int, std::size_t)> apply;
    std::size_t rank = 1;
    int kmin = -1;
    int kmax = -1;
};

// Exponents allowed for functions and for forms (in the dx frame); a missing bound is open.
struct Support {
    std::optional<int> f_lo, f_hi, w_lo, w_hi;
};

// Kernel and cokernel of op on the window of half width N.
// Rows cover Q = [max(-N, w_lo), min(N, w_hi)]; columns are exactly the monomials whose image
// stays in Q once the leading coefficients are invertible, so the cokernel is exact.
std::pair<long, long> laurent_cohomology(const LaurentOp& op, const Support& s, int N) {
    const int qlo = s.w_lo ? std::max(-N, *s.w_lo) : -N;
    const int qhi = s.w_hi ? std::min(N, *s.w_hi) : N;
    const int clo = s.f_lo ? *s.f_lo : qlo - op.kmin;
    const int chi = s.f_hi ? *s.f_hi : qhi - op.kmax;
    const std::size_t r = op.rank;
    const auto row_of = [&](const ElementaryModel::Term& t) {
        return static_cast<std::size_t>(t.alpha[0] - qlo) * r + t.fiber;
    };
    const std::size_t rows = qhi >= qlo ? static_cast<std::size_t>(qhi - qlo + 1) * r : 0;
    SparseMatrixQ m(rows, chi >= clo ? static_cast<std::size_t>(chi - clo + 1) * r : 0);
    for (int a = clo; a <= chi; ++a)
        for (std::size_t j = 0; j < r; ++j)
            for (const auto& t : op.apply(a, j)) {
                if (t.coeff == 0) continue;
                if (t.alpha[0] < qlo || t.alpha[0] > qhi)
                    throw Error("operator image leaves the band at exponent " + std::to_string(t.alpha[0]));
                m.add(row_of(t), static_cast<std::size_t>(a - clo) * r + j, t.coeff);
            }
    const long coker = static_cast<long>(rows) - static_cast<long>(rank_q(m));

    // kernel on the full window: images are kept whole
    const int klo = s.f_lo ? std::max(-N, *s.f_lo) : -N;
    const int khi = s.f_hi ? std::min(N, *s.f_hi) : N;
    std::map<std::pair<int, std::size_t>, std::size_t> rix;
    std::vector<std::tuple<std::pair<int, std::size_t>, std::size_t, Rational>> entries;
    for (int a = klo; a <= khi; ++a)
        for (std::size_t j = 0; j < r; ++j)
            for (const auto& t : op.apply(a, j)) {
                if (t.coeff == 0) continue;
                const std::pair<int, std::size_t> key{t.alpha[0], t.fiber};
                rix.emplace(key, rix.size());
                entries.emplace_back(key, static_cast<std::size_t>(a - klo) * r + j, t.coeff);
            }
    const std::size_t cols = khi >= klo ? static_cast<std::size_t>(khi - klo + 1) * r : 0;
    SparseMatrixQ k(rix.size(), cols);
    for (const auto& [key, col, v] : entries) k.add(rix.at(key), col, v);
    const long ker = static_cast<long>(cols) - static_cast<long>(rank_q(k));
    return {ker, coker};
}

std::pair<long, long> stable_laurent_cohomology(const LaurentOp& op, const Support& s, int N,
                                                const std::string& what) {
    const auto a = laurent_cohomology(op, s, N);
    for (int g : {2, 4})
        if (laurent_cohomology(op, s, N + g) != a) throw Error(what + ": cohomology changes with the window");
    return a;
}

// ∇_∂ of a rank one summand in the coordinate x: x^a ↦ a x^{a-1} + Σ c_k x^{a+k}.
LaurentOp curve_operator(const RankOneForm& omega) {
    LaurentOp op;
    for (const auto& [k, c] : omega.coeffs)
        if (c != 0) {
            op.kmin = std::min(op.kmin, k);
            op.kmax = std::max(op.kmax, k);
        }
    op.apply = [omega](int a, std::size_t) {
        std::vector<ElementaryModel::Term> out;
        if (a != 0) out.push_back({Exponent{a - 1}, 0, Rational(a)});
        for (const auto& [k, c] : omega.coeffs)
            if (c != 0) out.push_back({Exponent{a + k}, 0, c});
        return out;
    };
    return op;
}

// Matrix of x^a ↦ a x^a + Σ c_k x^{a+k+1} (∇ in the dx/x frame) between exponent ranges;
// terms outside rows are dropped, and when `exact` they must not occur.
SparseMatrixQ log_matrix(const RankOneForm& omega, int clo, int chi, int rlo, int rhi, bool exact) {
    const std::size_t rows = rhi >= rlo ? static_cast<std::size_t>(rhi - rlo + 1) : 0;
    const std::size_t cols = chi >= clo ? static_cast<std::size_t>(chi - clo + 1) : 0;
    SparseMatrixQ m(rows, cols);
    const auto put = [&](int b, int a, const Rational& v) {
        if (v == 0) return;
        if (b < rlo || b > rhi) {
            if (exact) throw Error("global section map leaves Ω¹(log D) ⊗ E_1 at exponent " + std::to_string(b));
            return;
        }
        m.add(static_cast<std::size_t>(b - rlo), static_cast<std::size_t>(a - clo), v);
    };
    for (int a = clo; a <= chi; ++a) {
        put(a, a, Rational(a));
        for (const auto& [k, c] : omega.coeffs) put(a + k + 1, a, c);
    }
    return m;
}

ElementaryModel model_at(const RankOneForm& omega, const P1Point& p) { return local_formal_type(omega, p).model(); }

// Pole order of F_jD·(x^{-s}O) in the model frame, j saturations by ∂.
int saturate(const ElementaryModel& blk, int s, int j) {
    const int m = blk.phi.pole_divisor()[0];
    for (int i = 0; i < j; ++i) {
        const int reach = s + 2 * (m + 2);
        s = derivation_step(blk, s, WeightWindow::cube(1, -reach, reach), false);
    }
    return s;
}

// F_p = Σ_{j+k≤p} F_jD·x^{-e[k]}O, p = 0..p_max.
std::vector<int> filtration_poles(const ElementaryModel& blk, const std::vector<int>& e, int p_max) {
    std::vector<int> out;
    for (int p = 0; p <= p_max; ++p) {
        int best = e.at(0);
        for (int k = 0; k <= p; ++k) best = std::max(best, saturate(blk, e.at(static_cast<std::size_t>(k)), p - k));
        out.push_back(best);
    }
    return out;
}

// gr_p of F_pM → F_{p+1}M dx for one block at a point, given model pole orders s_{p-1}, s_p, s_{p+1}.
SparseMatrixQ gr_dr_matrix(const ElementaryModel& blk, int prev, int cur, int next) {
    return one_variable_matrix(blk, Range1{-cur, -prev - 1}, Range1{-next, -cur - 1}, true);
}

// (m dx ⊗ e_j)·∂ = -(∂m) dx ⊗ e_j - m dx ⊗ ∇_∂ e_j, with m = x^a.
std::vector<ElementaryModel::Term> spencer_right_action(const ElementaryModel& blk, int a, std::size_t j) {
    std::vector<ElementaryModel::Term> out;
    if (a != 0) out.push_back({Exponent{a - 1}, j, Rational(-a)});
    for (auto t : partial(blk, 0, j)) {
        t.alpha[0] += a;
        t.coeff = -t.coeff;
        out.push_back(t);
    }
    return out;
}

SparseMatrixQ gr_spencer_matrix(const ElementaryModel& blk, int prev, int cur, int next) {
    const std::size_t r = blk.rank();
    const Range1 src{-cur, -prev - 1}, dst{-next, -cur - 1};
    SparseMatrixQ m(dst.count() * r, src.count() * r);
    for (int a = src.lo; a <= src.hi; ++a)
        for (std::size_t j = 0; j < r; ++j)
            for (const auto& t : spencer_right_action(blk, a, j)) {
                const int b = t.alpha[0];
                if (b > dst.hi) continue;  // lies in F_p
                if (b < dst.lo) throw Error("Spencer differential leaves F_{p+1}");
                m.add(static_cast<std::size_t>(b - dst.lo) * r + t.fiber, static_cast<std::size_t>(a - src.lo) * r + j,
                      t.coeff);
            }
    return m;
}

}  // namespace

PoleData GlobalTower::level(int i, std::size_t s, const TwistDivisor& delta) const {
    if (i < 0 || i > depth) throw InvalidArgument("tower level out of range");
    PoleData d = levels.at(static_cast<std::size_t>(i)).at(s);
    const auto& b = connection.boundary();
    if (b.contains(ZERO)) d.s0 += twist_at(delta, b, ZERO);
    if (b.contains(INF)) d.sinf += twist_at(delta, b, INF);
    return d;
}

long GlobalTower::degree(int i) const {
    long d = 0;
    for (const auto& l : levels.at(static_cast<std::size_t>(i))) d += l.degree();
    return d;
}

GlobalTower global_tower(const CurveConnection& c, int depth) {
    if (depth < 0) throw InvalidArgument("depth must be >= 0");
    if (c.boundary().size() == 0) throw InvalidArgument("the boundary must be nonempty");
    GlobalTower t{c, depth, std::vector<std::vector<PoleData>>(static_cast<std::size_t>(depth + 1))};
    for (const auto& omega : c.summands()) {
        std::vector<int> at0(static_cast<std::size_t>(depth + 1), 0), atinf = at0;
        if (c.boundary().contains(ZERO)) {
            const int tw = local_formal_type(omega, ZERO).twist;
            const auto s = local_shifts(omega, ZERO, depth);
            for (int i = 0; i <= depth; ++i) at0[static_cast<std::size_t>(i)] = s[static_cast<std::size_t>(i)] + tw;
        }
        if (c.boundary().contains(INF)) {
            const int tw = local_formal_type(omega, INF).twist;
            const auto s = local_shifts(omega, INF, depth);
            for (int i = 0; i <= depth; ++i) atinf[static_cast<std::size_t>(i)] = s[static_cast<std::size_t>(i)] + tw;
        }
        for (int i = 0; i <= depth; ++i)
            t.levels[static_cast<std::size_t>(i)].push_back({at0[static_cast<std::size_t>(i)], atinf[static_cast<std::size_t>(i)]});
    }
    return t;
}

Hypercohomology hypercohomology(const GlobalTower& t, const TwistDivisor& delta) {
    if (t.depth < 1) throw InvalidArgument("hypercohomology needs E_0 and E_1");
    const auto& d = t.connection.boundary();
    Hypercohomology h;
    for (std::size_t s = 0; s < t.connection.rank(); ++s) {
        const RankOneForm& omega = t.connection.summands()[s];
        const PoleData a = t.level(0, s, delta);
        PoleData b = t.level(1, s, delta);
        // f·dx/x needs one more order of vanishing where dx/x is not a log form
        if (!d.contains(ZERO)) b.s0 -= 1;
        if (!d.contains(INF)) b.sinf -= 1;
        const SparseMatrixQ g0 = log_matrix(omega, -a.s0, a.sinf, -b.s0, b.sinf, true);
        const SparseMatrixQ g1 = log_matrix(omega, a.sinf + 1, -a.s0 - 1, b.sinf + 1, -b.s0 - 1, false);
        const long r0 = static_cast<long>(rank_q(g0)), r1 = static_cast<long>(rank_q(g1));
        h.h0 += a.h0() - r0;
        h.h1 += (b.h0() - r0) + (a.h1() - r1);
        h.h2 += b.h1() - r1;
    }
    return h;
}

Hypercohomology de_rham_oracle_U(const CurveConnection& c, const WeightWindow& w) {
    if (w.n_vars() != 1) throw InvalidArgument("the oracle needs a one-variable window");
    const auto& d = c.boundary();
    if (d.size() == 0) throw InvalidArgument("U must be affine");
    Support s;
    if (!d.contains(ZERO)) s = {0, std::nullopt, 0, std::nullopt};  // k[x], forms f dx
    if (!d.contains(INF)) s = {std::nullopt, 0, std::nullopt, -2};  // k[1/x], forms g dy = -g x^{-2} dx
    const int N = std::max(w.hi()[0], -w.lo()[0]);
    Hypercohomology h;
    for (const auto& omega : c.summands()) {
        const auto [k, ck] = stable_laurent_cohomology(curve_operator(omega), s, N, "de Rham oracle");
        h.h0 += k;
        h.h1 += ck;
    }
    return h;
}

K0Class rhs_k_class(const GlobalTower& t) {
    if (t.depth < 1) throw InvalidArgument("the K-class needs E_0 and E_1");
    const LineBundleP1 omega_inv = canonical_bundle().dual();
    const LineBundleP1 logs = log_forms(t.connection.boundary());
    K0Class k;
    for (std::size_t s = 0; s < t.connection.rank(); ++s) {
        const LineBundleP1 e0 = LineBundleP1::of_degree(t.level(0, s).degree());
        const LineBundleP1 e1 = LineBundleP1::of_degree(t.level(1, s).degree());
        k = k + k0_class({SheafTerm::line(omega_inv.tensor(e0), -1),
                          SheafTerm::line(omega_inv.tensor(logs).tensor(e1), 1)});
    }
    return k;
}

long CoherentFiltration::degree(int p) const {
    long d = 0;
    for (const auto& l : pieces.at(static_cast<std::size_t>(p))) d += l.degree();
    return d;
}

CoherentFiltration coherent_filtration(const CurveConnection& c, const GlobalTower& t, int p_max) {
    if (p_max < 3) throw InvalidArgument("p_max must be >= 3 to see the slope");
    const GlobalTower big = t.depth >= p_max ? t : global_tower(c, p_max);
    const auto& d = c.boundary();
    CoherentFiltration f;
    f.pieces.assign(static_cast<std::size_t>(p_max + 1), {});
    f.model = f.pieces;
    for (std::size_t s = 0; s < c.rank(); ++s) {
        const RankOneForm& omega = c.summands()[s];
        std::vector<int> p0(static_cast<std::size_t>(p_max + 1), 0), pinf = p0, m0 = p0, minf = p0;
        for (const auto& pt : {ZERO, INF}) {
            if (!d.contains(pt)) continue;
            const LocalType lt = local_formal_type(omega, pt);
            // E_k(D) in the model frame
            std::vector<int> e;
            for (int k = 0; k <= p_max; ++k) {
                const PoleData l = big.level(k, s);
                e.push_back((pt.infinity ? l.sinf : l.s0) - lt.twist + 1);
            }
            const auto poles = filtration_poles(lt.model(), e, p_max);
            for (int p = 0; p <= p_max; ++p) {
                const std::size_t i = static_cast<std::size_t>(p);
                (pt.infinity ? minf : m0)[i] = poles[i];
                (pt.infinity ? pinf : p0)[i] = poles[i] + lt.twist;
            }
        }
        for (int p = 0; p <= p_max; ++p) {
            const std::size_t i = static_cast<std::size_t>(p);
            f.pieces[i].push_back({p0[i], pinf[i]});
            f.model[i].push_back({m0[i], minf[i]});
        }
    }
    const long s1 = f.degree(p_max) - f.degree(p_max - 1);
    const long s2 = f.degree(p_max - 1) - f.degree(p_max - 2);
    const long s3 = f.degree(p_max - 2) - f.degree(p_max - 3);
    if (s1 != s2 || s2 != s3) throw Error("coherent filtration growth not stabilized by p_max");
    f.slope = s1;
    return f;
}

bool gr_dr_acyclic(const CurveConnection& c, const CoherentFiltration& f, int p) {
    if (p < 1 || p + 1 >= static_cast<int>(f.model.size())) throw InvalidArgument("gr index out of range");
    const auto& d = c.boundary();
    for (std::size_t s = 0; s < c.rank(); ++s)
        for (const auto& pt : {ZERO, INF}) {
            if (!d.contains(pt)) continue;
            const auto pole = [&](int q) {
                const PoleData& l = f.model[static_cast<std::size_t>(q)][s];
                return pt.infinity ? l.sinf : l.s0;
            };
            const SparseMatrixQ g = gr_dr_matrix(model_at(c.summands()[s], pt), pole(p - 1), pole(p), pole(p + 1));
            if (g.rows() != g.cols() || rank_q(g) != g.cols()) return false;
        }
    return true;
}

P0Detection detect_p0(const CurveConnection& c, const CoherentFiltration& f) {
    P0Detection out;
    int m = 0;
    for (const auto& omega : c.summands())
        for (const auto& pt : {ZERO, INF})
            if (c.boundary().contains(pt)) m = std::max(m, local_formal_type(omega, pt).pole());
    out.cap = 2 + m * static_cast<int>(c.rank());
    const int top = static_cast<int>(f.model.size()) - 2;  // largest p with gr_p computable
    for (int p0 = 0; p0 <= out.cap && p0 + 2 <= top; ++p0)
        if (gr_dr_acyclic(c, f, p0 + 1) && gr_dr_acyclic(c, f, p0 + 2)) {
            out.p0 = p0;
            break;
        }
    return out;
}

K0Class lhs_k_class(const CurveConnection& c, const GlobalTower& t) {
    int m = 0;
    for (const auto& omega : c.summands())
        for (const auto& pt : {ZERO, INF})
            if (c.boundary().contains(pt)) m = std::max(m, local_formal_type(omega, pt).pole());
    const int cap = 2 + m * static_cast<int>(c.rank());
    const CoherentFiltration f = coherent_filtration(c, t, cap + 4);
    const P0Detection p = detect_p0(c, f);
    if (!p.found()) throw Error("p0 not found below the cap " + std::to_string(p.cap));
    const LineBundleP1 omega_inv = canonical_bundle().dual();
    K0Class k;
    for (std::size_t s = 0; s < c.rank(); ++s) {
        const LineBundleP1 a = LineBundleP1::of_degree(f.pieces[static_cast<std::size_t>(p.p0)][s].degree());
        const LineBundleP1 b = LineBundleP1::of_degree(f.pieces[static_cast<std::size_t>(p.p0 + 1)][s].degree());
        k = k + k0_class({SheafTerm::line(omega_inv.tensor(a), -1), SheafTerm::line(b, 1)});
    }
    return k;
}

CheckReport spencer_side_change_check(const FormalConnection& c, const WeightWindow& w, int p_max) {
    if (c.n_vars() != 1 || w.n_vars() != 1) throw InvalidArgument("the Spencer check is one-variable");
    CheckReport rep{"spencer", {}};
    const int N = std::max(w.hi()[0], -w.lo()[0]);
    const Support all;

    CheckEntry full{"full", {{-1, 0}, {0, 0}, {1, 0}, {2, 0}}, true, true, ""};
    for (const auto& blk : c.blocks()) {
        const int m = blk.phi.pole_divisor()[0];
        LaurentOp dr{[&blk](int a, std::size_t j) { return partial(blk, a, j); }, blk.rank(), -1 - m, -1};
        LaurentOp sp{[&blk](int a, std::size_t j) { return spencer_right_action(blk, a, j); }, blk.rank(), -1 - m, -1};
        try {
            const auto [sk, sc] = stable_laurent_cohomology(sp, all, N, "Spencer complex");
            const auto [dk, dc] = stable_laurent_cohomology(dr, all, N, "de Rham complex");
            full.dims[-1] += static_cast<std::size_t>(sk);
            full.dims[0] += static_cast<std::size_t>(sc);
            full.dims[1] += static_cast<std::size_t>(dk);
            full.dims[2] += static_cast<std::size_t>(dc);
        } catch (const Error& e) {
            full.stable = false;
            full.detail = e.what();
        }
    }
    full.pass = full.stable && full.dims[-1] == full.dims[1] && full.dims[0] == full.dims[2];
    if (full.stable && !full.pass) full.detail = "Sp(N) and DR(M)[1] differ";
    rep.entries.push_back(full);

    const LatticeTower t = tower(c, p_max + 1);
    for (int p = 1; p <= p_max; ++p) {
        CheckEntry e{"gr p=" + std::to_string(p), {{-1, 0}, {0, 0}, {1, 0}, {2, 0}}, true, true, ""};
        for (std::size_t b = 0; b < c.blocks().size(); ++b) {
            const auto& blk = c.blocks()[b];
            std::vector<int> ek;
            for (int k = 0; k <= p_max + 1; ++k) ek.push_back(t.floor_shift(b, k, TwistDivisor({1}))[0]);
            const auto s = filtration_poles(blk, ek, p + 1);
            const int prev = s[static_cast<std::size_t>(p - 1)], cur = s[static_cast<std::size_t>(p)],
                      next = s[static_cast<std::size_t>(p + 1)];
            const SparseMatrixQ g = gr_dr_matrix(blk, prev, cur, next);
            const SparseMatrixQ h = gr_spencer_matrix(blk, prev, cur, next);
            const std::size_t rg = rank_q(g), rh = rank_q(h);
            e.dims[-1] += h.cols() - rh;
            e.dims[0] += h.rows() - rh;
            e.dims[1] += g.cols() - rg;
            e.dims[2] += g.rows() - rg;
        }
        e.pass = e.dims[-1] == e.dims[1] && e.dims[0] == e.dims[2];
        if (!e.pass) e.detail = "graded pieces differ";
        rep.entries.push_back(e);
    }
    return rep;
}

}  // namespace loglattice
