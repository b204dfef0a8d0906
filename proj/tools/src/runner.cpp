#include "runner.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "acceptance.hpp"
#include "loglattice/char_class.hpp"
#include "loglattice/errors.hpp"
#include "loglattice/lattice_tower.hpp"
#include "loglattice/log_derham.hpp"
#include "loglattice/rees.hpp"

namespace loglattice::cli {

namespace {

struct Item {
    bool pass = true;
    bool skipped = false;
    json outputs = json::object();
    json evidence = json::array();
};

using ItemFn = std::function<Item()>;

json dims_json(const DimensionMap& d) {
    json o = json::object();
    for (const auto& [k, v] : d) o[std::to_string(k)] = v;
    return o;
}

json window_json(const WeightWindow& w) { return {{"lo", w.lo()}, {"hi", w.hi()}}; }

json check_json(const CheckReport& r) {
    json entries = json::array();
    for (const auto& e : r.entries) {
        json x{{"label", e.label}, {"dims", dims_json(e.dims)}, {"stable", e.stable}, {"pass", e.pass}};
        if (!e.detail.empty()) x["detail"] = e.detail;
        entries.push_back(x);
    }
    return {{"name", r.name}, {"pass", r.pass()}, {"entries", entries}};
}

json hyper_json(const Hypercohomology& h) { return {{"h0", h.h0}, {"h1", h.h1}, {"h2", h.h2}}; }
json k_json(const K0Class& k) { return {{"rank", k.rank}, {"degree", k.degree}}; }

// Windows w, w+2, ..., w+2(2+grow).
std::vector<WeightWindow> rounds(const WeightWindow& w, int grow) {
    std::vector<WeightWindow> out;
    for (int i = 0; i <= 2 + grow; ++i) out.push_back(w.enlarged(2 * i));
    return out;
}

// A dimension map that must not change with the window.
Item stabilized_item(const std::function<DimensionMap(const WeightWindow&)>& f, const WeightWindow& w, int grow) {
    Item it;
    std::vector<DimensionMap> seen;
    for (const auto& win : rounds(w, grow)) {
        seen.push_back(f(win));
        it.evidence.push_back({{"window", window_json(win)}, {"dims", dims_json(seen.back())}});
    }
    it.pass = std::all_of(seen.begin(), seen.end(), [&](const DimensionMap& d) { return d == seen.front(); });
    it.outputs["dims"] = dims_json(seen.front());
    it.outputs["stable"] = it.pass;
    return it;
}

// A check that already compares three windows internally; extra rounds rerun it on larger windows.
Item check_item(const std::function<CheckReport(const WeightWindow&)>& f, const WeightWindow& w, int grow) {
    Item it;
    const CheckReport base = f(w);
    it.outputs = check_json(base);
    it.pass = base.pass();
    const auto ws = stabilization_windows(w);
    for (const auto& win : ws) it.evidence.push_back({{"window", window_json(win)}, {"internal", true}});
    for (int i = 1; i <= grow; ++i) {
        const WeightWindow win = w.enlarged(2 * (2 + i));
        const CheckReport r = f(win);
        it.pass = it.pass && r.pass();
        it.evidence.push_back({{"window", window_json(win)}, {"pass", r.pass()}});
    }
    return it;
}

Item skipped(const std::string& why) {
    Item it;
    it.skipped = true;
    it.outputs["skipped"] = why;
    return it;
}

int pipeline_depth(std::size_t n) { return n == 1 ? 2 : 1; }

std::map<std::string, ItemFn> formal_items(const SpecDocument& s, const Flags& f) {
    const FormalConnection& c = s.formal;
    const std::size_t n = c.n_vars();
    const WeightWindow w = s.window;
    const TwistDivisor delta = s.delta;
    const int depth = s.depth, grow = f.window_grow;
    std::map<std::string, ItemFn> m;

    m["tower"] = [=] {
        Item it;
        const LatticeTower t = tower(c, depth);
        const bool eq = t.levels() == closed_form_tower(c, depth).levels();
        json levels = json::array();
        for (const auto& l : t.levels()) levels.push_back(l.shifts);
        it.outputs = {{"depth", depth}, {"levels", levels}, {"closed_form_equal", eq}};
        it.pass = eq;
        return it;
    };
    m["irregularity"] = [=] {
        Item it;
        json poles = json::array();
        for (const auto& b : c.blocks()) poles.push_back(b.phi.pole_divisor());
        it.outputs["pole_divisors"] = poles;
        it.outputs["regular_singular"] = is_regular_singular(c);
        if (n == 1) it.outputs["irregularity"] = irregularity(c);
        return it;
    };
    m["cohomology"] = [=] {
        const LatticeTower t = tower(c, depth);
        return stabilized_item(
            [&](const WeightWindow& win) { return complex_cohomology(build_log_complex(t, delta, win).base); }, w,
            grow);
    };
    m["alpha"] = [=] {
        const LatticeTower t = tower(c, depth);
        return check_item([&](const WeightWindow& win) { return check_alpha(t, delta, win, 3); }, w, grow);
    };
    m["beta"] = [=] { return check_item([&](const WeightWindow& win) { return check_beta(c, delta, win); }, w, grow); };
    m["filtered_qis"] = [=] {
        if (n != 1) return skipped("one variable only");
        return check_item([&](const WeightWindow& win) { return check_filtered_qis_P_sigma(c, delta, win); }, w, grow);
    };
    m["spencer"] = [=] {
        if (n != 1) return skipped("one variable only");
        return check_item([&](const WeightWindow& win) { return spencer_side_change_check(c, win); }, w, grow);
    };
    m["pipeline"] = [=] {
        const int p = pipeline_depth(n);
        const ReesBuilder b = tower_rees_builder(tower(c, p), delta, p);
        Item it = check_item([&](const WeightWindow& win) { return prop_b4_pipeline(b, win, p); }, w, grow);
        it.outputs["p_max"] = p;
        return it;
    };
    m["tensor_image"] = [=] {
        const int p = pipeline_depth(n);
        const LatticeTower t = tower(c, p + 1);
        Item it = check_item([&](const WeightWindow& win) { return tensor_image_check(t, win, p); }, w, grow);
        it.outputs["p_max"] = p;
        return it;
    };
    m["localization"] = [=] {
        const int k = n == 1 ? 3 : 2;
        Item it = check_item([&](const WeightWindow& win) { return localization_check(c, win, k); }, w, grow);
        it.outputs["k_max"] = k;
        return it;
    };
    m["euler"] = [=] {
        Item it;
        json per = json::object();
        for (std::size_t j = 0; j < n; ++j) {
            for (const auto& win : rounds(w, grow)) {
                const EulerReport r = euler_bijectivity(c, {j}, j, 8, win);
                it.pass = it.pass && r.bijective;
                it.evidence.push_back({{"window", window_json(win)}, {"direction", j}, {"bijective", r.bijective}});
                if (win.lo() == w.lo()) per[std::to_string(j)] = {{"bijective", r.bijective}, {"failures", r.failures}};
            }
        }
        it.outputs = {{"k_max", 8}, {"directions", per}};
        return it;
    };
    return m;
}

GlobalTower curve_tower(const SpecDocument& s) { return global_tower(s.curve, std::max(s.depth, 1)); }

std::map<std::string, ItemFn> curve_items(const SpecDocument& s, const Flags& f) {
    const CurveConnection& c = s.curve;
    const WeightWindow w = s.window;
    const TwistDivisor delta = s.delta;
    const int grow = f.window_grow;
    const std::size_t nd = c.boundary().size();
    std::map<std::string, ItemFn> m;

    m["tower"] = [=] {
        Item it;
        const GlobalTower t = curve_tower(s);
        json levels = json::array();
        json degrees = json::array();
        for (int i = 0; i <= t.depth; ++i) {
            json lv = json::array();
            for (std::size_t k = 0; k < c.rank(); ++k) {
                const PoleData p = t.level(i, k, delta);
                lv.push_back({{"0", p.s0}, {"inf", p.sinf}});
            }
            levels.push_back(lv);
            degrees.push_back(t.degree(i));
        }
        it.outputs = {{"depth", t.depth}, {"levels", levels}, {"degrees", degrees}};
        return it;
    };
    m["irregularity"] = [=] {
        Item it;
        json pts = json::object();
        long total = 0;
        for (const auto& p : c.boundary().points()) {
            long v = 0;
            for (const auto& om : c.summands()) v += local_formal_type(om, p).pole();
            pts[p.infinity ? "inf" : "0"] = v;
            total += v;
        }
        it.outputs = {{"points", pts}, {"total", total}};
        return it;
    };
    m["hypercohomology"] = [=] {
        Item it;
        const GlobalTower t = curve_tower(s);
        const Hypercohomology h = hypercohomology(t, delta);
        json twists = json::object();
        bool same = true;
        for (int k = 0; k <= 2; ++k) {
            const Hypercohomology hk = hypercohomology(t, TwistDivisor::multiple(nd, k));
            twists[std::to_string(k) + "D"] = hyper_json(hk);
            same = same && hk == h;
        }
        std::vector<Hypercohomology> oracle;
        for (const auto& win : rounds(w, grow)) {
            oracle.push_back(de_rham_oracle_U(c, win));
            it.evidence.push_back({{"window", window_json(win)}, {"oracle", hyper_json(oracle.back())}});
        }
        const bool stable =
            std::all_of(oracle.begin(), oracle.end(), [&](const Hypercohomology& o) { return o == oracle.front(); });
        it.outputs = {{"hypercohomology", hyper_json(h)},
                      {"twists", twists},
                      {"oracle", hyper_json(oracle.front())},
                      {"twist_independent", same},
                      {"stable", stable}};
        it.pass = same && stable && h == oracle.front();
        return it;
    };
    m["kclass"] = [=] {
        Item it;
        const GlobalTower t = curve_tower(s);
        const K0Class r = rhs_k_class(t), l = lhs_k_class(c, t);
        it.outputs = {{"rhs", k_json(r)}, {"lhs", k_json(l)}};
        it.pass = r == l && r.rank == 0;
        return it;
    };
    m["p0"] = [=] {
        Item it;
        const GlobalTower t = curve_tower(s);
        int mp = 0;
        for (const auto& om : c.summands())
            for (const auto& p : c.boundary().points()) mp = std::max(mp, local_formal_type(om, p).pole());
        const int p_max = 2 + mp * static_cast<int>(c.rank()) + 4;
        const CoherentFiltration cf = coherent_filtration(c, t, p_max);
        const P0Detection d = detect_p0(c, cf);
        json degrees = json::array();
        for (int p = 0; p <= p_max; ++p) degrees.push_back(cf.degree(p));
        it.outputs = {{"p0", d.p0}, {"cap", d.cap}, {"found", d.found()}, {"slope", cf.slope}, {"degrees", degrees}};
        it.pass = d.found();
        return it;
    };
    return m;
}

std::vector<std::string> command_suites(const std::string& command, const SpecDocument& s) {
    const bool formal = s.mode == Mode::Formal;
    if (command == "tower") return {"tower"};
    if (command == "irregularity") return {"irregularity"};
    if (command == "cohomology") return formal ? std::vector<std::string>{"alpha", "beta", "cohomology"}
                                               : std::vector<std::string>{"hypercohomology"};
    if (command == "kclass") {
        if (formal) throw SchemaError("mode", "kclass needs a curve spec");
        return {"kclass", "p0"};
    }
    if (command == "rees") {
        if (!formal) throw SchemaError("mode", "rees needs a formal spec");
        return {"euler", "localization", "pipeline", "tensor_image"};
    }
    if (command == "verify") return s.suites;
    throw SchemaError("command", "unknown command \"" + command + "\"");
}

std::vector<std::size_t> evaluation_order(std::size_t n, const std::optional<std::uint64_t>& seed) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    if (seed) {
        std::mt19937_64 rng(*seed);
        std::shuffle(order.begin(), order.end(), rng);
    }
    return order;
}

json spec_json(const SpecDocument& s) {
    json j = s.source;
    j["name"] = s.name;
    j["window"] = window_json(s.window);
    j["delta"] = s.delta.multiplicities();
    j["depth"] = s.depth;
    j["suites"] = s.suites;
    return j;
}

json flags_json(const Flags& f) {
    json j{{"window_grow", f.window_grow}, {"strict_exit", f.strict_exit}, {"block_dimension_cap", block_dimension_cap()}};
    if (f.seed) j["seed"] = *f.seed;
    return j;
}

}  // namespace

const std::vector<std::string>& spec_commands() {
    static const std::vector<std::string> c{"tower", "irregularity", "cohomology", "kclass", "rees", "verify"};
    return c;
}

RunResult run_command(const std::string& command, SpecDocument spec, const Flags& flags) {
    if (flags.depth) override_depth(spec, *flags.depth);
    if (flags.delta) override_delta(spec, *flags.delta);
    if (flags.window_grow < 0) throw SchemaError("--window-grow", "must be >= 0");
    const std::vector<std::string> names = command_suites(command, spec);
    const auto all = spec.mode == Mode::Formal ? formal_items(spec, flags) : curve_items(spec, flags);

    std::map<std::string, json> done;
    for (std::size_t i : evaluation_order(names.size(), flags.seed)) {
        const std::string& name = names[i];
        json rec{{"name", name}};
        const auto t0 = std::chrono::steady_clock::now();
        try {
            const Item it = all.at(name)();
            rec["pass"] = it.pass;
            rec["outputs"] = it.outputs;
            rec["evidence"] = it.evidence;
            if (it.skipped) rec["skipped"] = true;
        } catch (const std::exception& e) {
            rec["pass"] = false;
            rec["error"] = e.what();
        }
        if (flags.timing)
            rec["seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        done[name] = rec;
    }

    json items = json::array();
    for (auto& [name, rec] : done) items.push_back(rec);
    json report{{"command", command}, {"spec", spec_json(spec)}, {"flags", flags_json(flags)}, {"items", items}};
    RunResult r;
    r.exit_code = exit_code_of(report, flags.strict_exit);
    report["pass"] = r.exit_code == 0;
    r.report = report;
    return r;
}

RunResult run_acceptance_command(const Flags& flags) {
    if (flags.window_grow < 0) throw SchemaError("--window-grow", "must be >= 0");
    AcceptanceOptions o;
    if (flags.seed) o.seed = *flags.seed;
    o.window_grow = flags.window_grow;
    json items = json::array();
    for (const auto& c : run_acceptance(o)) {
        json rec{{"name", "criterion " + std::to_string(c.id)},
                 {"pass", c.pass},
                 {"outputs", {{"title", c.title}, {"detail", c.detail}}}};
        if (flags.timing) rec["seconds"] = c.seconds;
        items.push_back(rec);
    }
    json report{{"command", "verify"}, {"spec", nullptr}, {"flags", flags_json(flags)}, {"items", items}};
    RunResult r;
    r.exit_code = exit_code_of(report, flags.strict_exit);
    report["pass"] = r.exit_code == 0;
    r.report = report;
    return r;
}

int exit_code_of(const json& report, bool strict) {
    for (const auto& it : report.at("items")) {
        if (!it.value("pass", false)) return 1;
        if (strict && it.value("skipped", false)) return 1;
    }
    return 0;
}

json without_timing(json report) {
    if (report.contains("items"))
        for (auto& it : report["items"]) it.erase("seconds");
    return report;
}

std::string pretty_report(const json& report) {
    if (!report.is_object() || !report.contains("items") || !report["items"].is_array() || !report.contains("command"))
        throw SchemaError("", "not a report: expected command and items");
    std::ostringstream out;
    const json& spec = report.value("spec", json());
    out << "command: " << report["command"].get<std::string>();
    if (spec.is_object() && spec.contains("name")) out << "  spec: " << spec["name"].get<std::string>();
    out << "  " << (report.value("pass", false) ? "PASS" : "FAIL") << "\n";
    if (spec.is_object() && spec.contains("window"))
        out << "window: " << spec["window"].dump() << "  delta: " << spec.value("delta", json()).dump()
            << "  depth: " << spec.value("depth", json()).dump() << "\n";
    std::size_t width = 4;
    for (const auto& it : report["items"]) width = std::max(width, it.value("name", std::string()).size());
    for (const auto& it : report["items"]) {
        const std::string name = it.value("name", std::string("?"));
        out << "  " << name << std::string(width - name.size() + 2, ' ')
            << (it.value("skipped", false) ? "SKIP" : it.value("pass", false) ? "pass" : "FAIL");
        if (it.contains("seconds")) {
            std::ostringstream t;
            t.precision(3);
            t << std::fixed << it["seconds"].get<double>();
            out << "  " << t.str() << "s";
        }
        out << "\n";
        if (it.contains("error")) out << "      error: " << it["error"].get<std::string>() << "\n";
        const json& o = it.value("outputs", json::object());
        if (o.contains("entries")) {
            for (const auto& e : o["entries"]) {
                out << "      " << (e.value("pass", false) ? "ok   " : "FAIL ") << e.value("label", std::string())
                    << "  " << e.value("dims", json::object()).dump();
                if (e.contains("detail")) out << "  " << e["detail"].get<std::string>();
                out << "\n";
            }
        } else {
            for (const auto& [k, v] : o.items()) out << "      " << k << ": " << v.dump() << "\n";
        }
    }
    return out.str();
}

}  // namespace loglattice::cli
