#include "acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "loglattice/errors.hpp"
#include "loglattice/lattice_tower.hpp"
#include "loglattice/log_derham.hpp"
#include "loglattice/rees.hpp"

namespace loglattice::cli {

namespace {

Rational q(long p, long d) {
    Rational r(p, d);
    r.canonicalize();
    return r;
}

ElementaryModel irregular(const Exponent& pole, const Rational& lambda = 0, std::size_t rank = 1) {
    return {ExponentialFactor::monomial(pole), RegularBlock::scalar(pole.size(), lambda, rank)};
}

ElementaryModel regular(std::size_t n, const Rational& lambda, std::size_t rank = 1) {
    return {ExponentialFactor(n), RegularBlock::scalar(n, lambda, rank)};
}

RankOneForm form(std::map<int, Rational> c) { return RankOneForm{std::move(c)}; }

WeightWindow window_for(std::size_t n, const AcceptanceOptions& o) { return WeightWindow::cube(n, -o.half_width, o.half_width); }

// Windows beyond the three every check compares internally.
std::vector<WeightWindow> extra_windows(const WeightWindow& w, const AcceptanceOptions& o) {
    std::vector<WeightWindow> out;
    for (int i = 1; i <= o.window_grow; ++i) out.push_back(w.enlarged(2 * (2 + i)));
    return out;
}

// Collects failures; the criterion passes when there are none.
class Tally {
public:
    void expect(bool ok, const std::string& what) {
        ++checks_;
        if (!ok && failures_.size() < 6) failures_.push_back(what);
        failed_ = failed_ || !ok;
    }
    bool pass() const { return !failed_; }
    std::string summary(const std::string& ok_text) const {
        if (!failed_) return ok_text + " (" + std::to_string(checks_) + " checks)";
        std::string s;
        for (const auto& f : failures_) s += (s.empty() ? "" : "; ") + f;
        return s;
    }

private:
    std::size_t checks_ = 0;
    bool failed_ = false;
    std::vector<std::string> failures_;
};

std::vector<NamedFormal> pure_one_variable() {
    std::vector<NamedFormal> out;
    for (auto& c : formal_catalog())
        if (c.connection.n_vars() == 1 && c.connection.blocks().size() == 1) out.push_back(c);
    return out;
}

std::string hstr(const Hypercohomology& h) {
    return "(" + std::to_string(h.h0) + "," + std::to_string(h.h1) + "," + std::to_string(h.h2) + ")";
}

const CurveConnection& curve_named(const std::vector<NamedCurve>& cat, const std::string& name) {
    for (const auto& c : cat)
        if (c.name == name) return c.connection;
    throw InvalidArgument("no catalog curve " + name);
}

CriterionResult tower_equivalence(const AcceptanceOptions& o) {
    Tally t;
    const auto cat = random_catalog(o.seed, 30);
    std::size_t blocks = 0;
    for (const auto& c : cat) {
        blocks += c.connection.blocks().size();
        for (int depth = 0; depth <= 4; ++depth)
            t.expect(tower(c.connection, depth).levels() == closed_form_tower(c.connection, depth).levels(),
                     c.name + " depth " + std::to_string(depth));
    }
    t.expect(blocks >= 25, "only " + std::to_string(blocks) + " blocks");
    return {1, "tower equals the closed form on random good blocks", t.pass(),
            t.summary(std::to_string(cat.size()) + " connections, " + std::to_string(blocks) + " blocks, depths 0..4")};
}

CriterionResult graded_acyclicity(const AcceptanceOptions& o) {
    Tally t;
    const auto cat = formal_catalog();
    for (const auto& c : cat) {
        const std::size_t n = c.connection.n_vars();
        const LatticeTower tw = tower(c.connection, static_cast<int>(n));
        const WeightWindow w = window_for(n, o);
        const CheckReport r = check_alpha(tw, TwistDivisor::zero(n), w, 3);
        t.expect(r.pass(), c.name + ": " + r.failures());
        for (const auto& win : extra_windows(w, o))
            t.expect(check_alpha(tw, TwistDivisor::zero(n), win, 3).pass(), c.name + " on a larger window");
    }
    return {2, "gr^F_q of the log de Rham complex is acyclic, q = 1..3", t.pass(),
            t.summary(std::to_string(cat.size()) + " formal connections, three windows each")};
}

CriterionResult oracle_equality(const AcceptanceOptions& o) {
    Tally t;
    const auto cat = curve_catalog();
    const WeightWindow w = window_for(1, o);
    for (const auto& c : cat) {
        const GlobalTower g = global_tower(c.connection, 1);
        const Hypercohomology oracle = de_rham_oracle_U(c.connection, w);
        for (const auto& win : extra_windows(w, o))
            t.expect(de_rham_oracle_U(c.connection, win) == oracle, c.name + ": oracle moves with the window");
        for (int k = 0; k <= 2; ++k) {
            const Hypercohomology h = hypercohomology(g, TwistDivisor::multiple(c.connection.boundary().size(), k));
            t.expect(h == oracle, c.name + " delta " + std::to_string(k) + "D: " + hstr(h) + " vs oracle " + hstr(oracle));
        }
    }
    const auto at0 = [&](const std::string& name) {
        return hypercohomology(global_tower(curve_named(cat, name), 1), TwistDivisor::multiple(2, 0));
    };
    t.expect(at0("exp_inv_x") == Hypercohomology{0, 1, 0}, "e^{1/x} should give (0,1)");
    t.expect(at0("trivial") == Hypercohomology{1, 1, 0}, "trivial should give (1,1)");
    t.expect(at0("kummer_half") == Hypercohomology{0, 0, 0}, "Kummer 1/2 should give (0,0)");
    t.expect(hypercohomology(global_tower(curve_named(cat, "d_plus_dx"), 1), TwistDivisor({0})) ==
                 de_rham_oracle_U(curve_named(cat, "d_plus_dx"), w),
             "d + dx");
    return {3, "hypercohomology of the good model equals de Rham cohomology of U", t.pass(),
            t.summary(std::to_string(cat.size()) + " curves, delta in {0, D, 2D}")};
}

CriterionResult k_classes(const AcceptanceOptions&) {
    Tally t;
    const auto cat = curve_catalog();
    std::map<std::string, K0Class> got;
    for (const auto& c : cat) {
        const GlobalTower g = global_tower(c.connection, 1);
        const K0Class r = rhs_k_class(g), l = lhs_k_class(c.connection, g);
        t.expect(r == l, c.name + ": rhs (" + std::to_string(r.rank) + "," + std::to_string(r.degree) + ") lhs (" +
                             std::to_string(l.rank) + "," + std::to_string(l.degree) + ")");
        t.expect(r.rank == 0 && l.rank == 0, c.name + ": nonzero rank component");
        got[c.name] = r;
    }
    t.expect(got.at("exp_inv_x") == K0Class{0, 1}, "e^{1/x} should give (0,1)");
    t.expect(got.at("trivial") == K0Class{0, 0}, "trivial should give (0,0)");
    return {4, "both characteristic class formulas agree", t.pass(),
            t.summary(std::to_string(cat.size()) + " curves, rank component 0")};
}

CriterionResult filtered_comparison(const AcceptanceOptions& o) {
    Tally t;
    const WeightWindow w = window_for(1, o);
    const auto pure = pure_one_variable();
    for (const auto& c : pure) {
        const CheckReport r = check_filtered_qis_P_sigma(c.connection, TwistDivisor(), w);
        t.expect(r.pass(), c.name + ": " + r.failures());
    }
    const FormalConnection control(1, {regular(1, 1)});
    const CheckReport bad = check_filtered_qis_P_sigma(control, TwistDivisor(), w);
    t.expect(!bad.pass(), "residue 1 control was not detected");
    return {5, "sigma and pole filtrations are quasi-isomorphic", t.pass(),
            t.summary(std::to_string(pure.size()) + " pure blocks pass, residue 1 control fails")};
}

CriterionResult localization(const AcceptanceOptions& o) {
    Tally t;
    const auto cat = formal_catalog();
    for (const auto& c : cat) {
        const std::size_t n = c.connection.n_vars();
        const WeightWindow w = window_for(n, o);
        const int k_max = n == 1 ? o.half_width : o.half_width / 4;
        const CheckReport r = localization_check(c.connection, w, k_max);
        t.expect(r.pass(), c.name + ": " + r.failures());
        for (std::size_t j = 0; j < n; ++j) {
            const EulerReport e = euler_bijectivity(c.connection, {j}, j, 8, w);
            t.expect(e.bijective, c.name + ": Eu + k singular, " + (e.failures.empty() ? "" : e.failures.front()));
        }
    }
    const EulerReport bad = euler_bijectivity(FormalConnection(1, {regular(1, 1)}), {0}, 0, 8, window_for(1, o));
    t.expect(!bad.bijective, "residue 1 control was not detected");
    t.expect(bad.failures.size() == 1 && bad.failures.front().find("k=1") != std::string::npos,
             "residue 1 control should fail at k=1 only");
    return {6, "localization staircase and Euler bijectivity", t.pass(),
            t.summary(std::to_string(cat.size()) + " connections, k = 1..8, control fails at k=1")};
}

CriterionResult rees_pipeline(const AcceptanceOptions& o) {
    Tally t;
    const auto cat = formal_catalog();
    for (const auto& c : cat) {
        const std::size_t n = c.connection.n_vars();
        const int p = n == 1 ? 2 : 1;
        const ReesBuilder b = tower_rees_builder(tower(c.connection, p), TwistDivisor::multiple(n, 1), p);
        const WeightWindow w = window_for(n, o);
        const CheckReport r = prop_b4_pipeline(b, w, p);
        t.expect(r.pass(), c.name + ": " + r.failures());
        for (const auto& win : extra_windows(w, o)) t.expect(prop_b4_pipeline(b, win, p).pass(), c.name + " larger window");
    }
    const FormalConnection x1(1, {irregular({1})});
    const ReesBuilder base = tower_rees_builder(tower(x1, 1), TwistDivisor::multiple(1, 1), 1);
    const CheckReport tors =
        prop_b4_pipeline([&](const WeightWindow& win) { return with_x1_torsion(base(win)); }, window_for(1, o), 1);
    t.expect(!tors.pass(), "x-torsion control was not flagged");
    const CheckReport zt = prop_b4_pipeline([](const WeightWindow&) { return z_torsion_control(2); }, window_for(1, o), 1);
    t.expect(!zt.pass(), "z-torsion control was not flagged");
    return {7, "Rees module strict, regular sequences, Koszul concentrated in degree 0", t.pass(),
            t.summary(std::to_string(cat.size()) + " modules pass, 2 controls flagged")};
}

CriterionResult appendix_consistency(const AcceptanceOptions& o) {
    Tally t;
    const auto pure = formal_catalog();
    std::size_t spencer = 0;
    for (const auto& c : pure) {
        if (c.connection.n_vars() != 1) continue;
        const CheckReport r = spencer_side_change_check(c.connection, window_for(1, o));
        t.expect(r.pass(), c.name + ": " + r.failures());
        ++spencer;
    }
    t.expect(spencer >= 4, "fewer than 4 Spencer examples");
    const auto cat = curve_catalog();
    for (const auto& c : cat) {
        const CoherentFiltration f = coherent_filtration(c.connection, global_tower(c.connection, 1), 12);
        const P0Detection d = detect_p0(c.connection, f);
        t.expect(d.found(), c.name + ": p0 not found below " + std::to_string(d.cap));
        if (d.found())
            t.expect(gr_dr_acyclic(c.connection, f, d.p0 + 1) && gr_dr_acyclic(c.connection, f, d.p0 + 2),
                     c.name + ": gr not acyclic past p0");
    }
    return {8, "Spencer complex matches DR[1]; p0 detection terminates", t.pass(),
            t.summary(std::to_string(spencer) + " Spencer examples, " + std::to_string(cat.size()) + " curves")};
}

// name -> rendered dimensions, evaluated in the given order on the default window grown by g.
std::map<std::string, std::string> quantities(const std::vector<std::size_t>& order, int g, const AcceptanceOptions& o) {
    std::vector<std::pair<std::string, std::function<std::string(const WeightWindow&)>>> q;
    std::vector<std::size_t> vars;
    for (const auto& c : curve_catalog()) {
        vars.push_back(1);
        q.push_back({"oracle " + c.name, [c](const WeightWindow& w) { return hstr(de_rham_oracle_U(c.connection, w)); }});
    }
    for (const auto& c : formal_catalog()) {
        const std::size_t n = c.connection.n_vars();
        const LatticeTower t = tower(c.connection, static_cast<int>(n));
        vars.push_back(n);
        q.push_back({"log de Rham " + c.name, [t, n](const WeightWindow& w) {
                         return to_string(complex_cohomology(build_log_complex(t, TwistDivisor::zero(n), w).base));
                     }});
    }
    std::map<std::string, std::string> out;
    for (std::size_t i : order) {
        if (i >= q.size()) continue;
        out[q[i].first] = q[i].second(window_for(vars[i], o).enlarged(2 * g));
    }
    return out;
}

CriterionResult determinism(const AcceptanceOptions& o) {
    Tally t;
    const std::size_t count = curve_catalog().size() + formal_catalog().size();
    std::vector<std::size_t> canonical(count);
    std::iota(canonical.begin(), canonical.end(), 0);
    const auto base = quantities(canonical, 0, o);
    for (std::uint64_t s : {o.seed, o.seed + 1}) {
        std::vector<std::size_t> perm = canonical;
        std::mt19937_64 rng(s);
        std::shuffle(perm.begin(), perm.end(), rng);
        t.expect(quantities(perm, 0, o) == base, "seed " + std::to_string(s) + " changes a dimension");
    }
    for (int g = 1; g <= 2 + o.window_grow; ++g) {
        const auto grown = quantities(canonical, g, o);
        for (const auto& [k, v] : base)
            t.expect(grown.at(k) == v, k + " changes on window +" + std::to_string(2 * g) + ": " + v + " -> " + grown.at(k));
    }
    return {9, "dimensions are stable under enlargement and evaluation order", t.pass(),
            t.summary(std::to_string(base.size()) + " quantities, " + std::to_string(2 + o.window_grow) + " enlargements, two permutations")};
}

}  // namespace

std::vector<NamedFormal> formal_catalog() {
    DenseMatrixQ nil{{0, 1}, {0, 0}};
    ElementaryModel jordan = regular(1, 0, 2);
    jordan.regular.nilpotent = {nil};
    ElementaryModel twisted_jordan = irregular({1}, q(1, 3), 2);
    twisted_jordan.regular.nilpotent = {nil};
    ElementaryModel wide{ExponentialFactor::monomial({2}, 3), RegularBlock::scalar(1, q(1, 2))};
    wide.phi.add_term({1}, q(-1, 2));
    return {{"exp_inv_x", FormalConnection(1, {irregular({1})})},
            {"exp_inv_x2_third", FormalConnection(1, {irregular({2}, q(1, 3))})},
            {"exp_inv_x3", FormalConnection(1, {irregular({3})})},
            {"exp_inv_x2_lower_term", FormalConnection(1, {wide})},
            {"regular_0", FormalConnection(1, {regular(1, 0)})},
            {"regular_third", FormalConnection(1, {regular(1, q(1, 3))})},
            {"regular_half", FormalConnection(1, {regular(1, q(1, 2))})},
            {"regular_jordan", FormalConnection(1, {jordan})},
            {"exp_inv_x_jordan", FormalConnection(1, {twisted_jordan})},
            {"sum_x2_regular", FormalConnection(1, {irregular({2}), regular(1, 0, 2)})},
            {"bidisc_x1", FormalConnection(2, {irregular({1, 0})})},
            {"bidisc_x1x2", FormalConnection(2, {irregular({1, 1})})},
            {"bidisc_x1x2_sq", FormalConnection(2, {irregular({1, 2}, q(1, 2))})},
            {"bidisc_regular", FormalConnection(2, {{ExponentialFactor(2), {1, {0, q(1, 2)}, {}}}})},
            {"bidisc_sum", FormalConnection(2, {irregular({1, 0}), regular(2, 0)})}};
}

std::vector<NamedCurve> curve_catalog() {
    const BoundaryDivisor gm({P1Point::at(0), P1Point::at_infinity()});
    return {{"exp_inv_x", CurveConnection(gm, {form({{-2, -1}})})},
            {"trivial", CurveConnection(gm, {form({})})},
            {"kummer_half", CurveConnection(gm, {form({{-1, q(1, 2)}})})},
            {"d_plus_dx", CurveConnection(BoundaryDivisor({P1Point::at_infinity()}), {form({{0, 1}})})},
            {"exp_inv_x2", CurveConnection(gm, {form({{-3, -2}})})},
            {"exp_x_plus_inv_x", CurveConnection(gm, {form({{0, 1}, {-2, -1}})})},
            {"sum_exp_kummer_third", CurveConnection(gm, {form({{-2, -1}}), form({{-1, q(1, 3)}})})},
            {"residue_minus_5_2_irregular", CurveConnection(gm, {form({{-1, q(-5, 2)}, {-3, 1}})})},
            {"exp_inv_x_affine", CurveConnection(BoundaryDivisor({P1Point::at(0)}), {form({{-2, -1}})})}};
}

std::vector<NamedFormal> random_catalog(std::uint64_t seed, std::size_t count) {
    std::mt19937_64 rng(seed);
    const auto uniform = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    const Rational residues[] = {0, q(1, 3), q(1, 2)};
    std::vector<NamedFormal> out;
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t n = static_cast<std::size_t>(uniform(1, 2));
        std::vector<ElementaryModel> blocks;
        const int nb = uniform(1, 2);
        for (int b = 0; b < nb; ++b) {
            Exponent m(n);
            for (auto& v : m) v = uniform(1, 3);
            ElementaryModel blk{ExponentialFactor::monomial(m, uniform(1, 3)),
                                RegularBlock::scalar(n, residues[uniform(0, 2)], static_cast<std::size_t>(uniform(1, 2)))};
            if (uniform(0, 1)) {
                Exponent low = m;
                low[0] -= 1;
                if (std::any_of(low.begin(), low.end(), [](int v) { return v > 0; })) blk.phi.add_term(low, q(uniform(-3, 3), 2));
            }
            if (blk.rank() == 2 && uniform(0, 1)) blk.regular.nilpotent.assign(n, DenseMatrixQ{{0, 1}, {0, 0}});
            blocks.push_back(blk);
        }
        out.push_back({"random " + std::to_string(i), FormalConnection(n, blocks)});
    }
    return out;
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& o) {
    const std::vector<std::function<CriterionResult(const AcceptanceOptions&)>> all{
        tower_equivalence, graded_acyclicity, oracle_equality, k_classes,   filtered_comparison,
        localization,      rees_pipeline,     appendix_consistency, determinism};
    std::vector<CriterionResult> out;
    for (std::size_t i = 0; i < all.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        CriterionResult r;
        try {
            r = all[i](o);
        } catch (const std::exception& e) {
            r = {static_cast<int>(i + 1), "criterion " + std::to_string(i + 1), false, e.what(), 0};
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        out.push_back(r);
    }
    return out;
}

}  // namespace loglattice::cli
