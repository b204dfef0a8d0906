#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <set>
#include <string>

#include "acceptance.hpp"
#include "doctest.h"
#include "loglattice/sparse_matrix.hpp"
#include "runner.hpp"

using namespace loglattice;
using namespace loglattice::cli;

namespace {

const std::string CATALOG = LOGLATTICE_CATALOG_DIR;

SpecDocument catalog_spec(const std::string& name) { return load_spec(CATALOG + "/" + name + ".json"); }

// Path named by the SchemaError thrown while parsing `text`.
std::string error_path(const std::string& text) {
    try {
        parse_spec(json::parse(text));
    } catch (const SchemaError& e) {
        return e.path();
    }
    return "<no error>";
}

const json& item(const json& report, const std::string& name) {
    for (const auto& it : report.at("items"))
        if (it.at("name") == name) return it;
    throw std::runtime_error("no item " + name);
}

int run_tool(const std::string& args, const std::string& env = "") {
    const int status =
        std::system((env + " " + std::string(LOGLATTICE_TOOL) + " " + args + " > /dev/null 2>&1").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string write_temp(const std::string& name, const std::string& text) {
    const std::string path = "test_cli_" + name + ".json";
    std::ofstream(path) << text;
    return path;
}

const std::string FORMAL = R"({"mode": "formal", "n_vars": 1, "blocks": [{"phi": [{"pole": [1], "coeff": "1"}]}]})";

}  // namespace

TEST_CASE("catalog specs parse") {
    for (const char* n : {"exp_1_over_x", "trivial_gm", "kummer_half", "d_plus_dx", "exp_1_over_x_local", "x_inv3",
                          "regular_jordan", "bidisc_x1x2"})
        CHECK_NOTHROW(catalog_spec(n));

    const auto e = catalog_spec("exp_1_over_x");
    CHECK(e.mode == Mode::Curve);
    CHECK(e.curve.boundary().size() == 2);
    CHECK(e.curve.summands().front().coeffs.at(-2) == -1);
    CHECK(e.delta == TwistDivisor({0, 0}));

    const auto b = catalog_spec("bidisc_x1x2");
    CHECK(b.formal.n_vars() == 2);
    CHECK(b.formal.blocks().size() == 2);
    CHECK(b.formal.blocks()[1].regular.residues[1] == Rational(1, 2));
    CHECK(b.window == WeightWindow::cube(2, -12, 12));
    // one-variable suites are not defaults on the bidisc
    CHECK(std::find(b.suites.begin(), b.suites.end(), "spencer") == b.suites.end());

    const auto j = catalog_spec("regular_jordan");
    CHECK(j.formal.blocks()[0].regular.nilpotent_entry(0, 0, 1) == 1);
    CHECK(j.suites.size() == 6);
}

TEST_CASE("defaults") {
    const auto s = parse_spec(json::parse(FORMAL), "x");
    CHECK(s.name == "x");
    CHECK(s.window == WeightWindow::cube(1, -12, 12));
    CHECK(s.delta == TwistDivisor({1}));
    CHECK(s.depth == 3);
    CHECK(s.suites == known_suites(Mode::Formal));

    const auto c = parse_spec(json::parse(R"({"mode": "curve", "points": ["inf"], "summands": [{"omega": {"0": 1}}]})"));
    CHECK(c.delta == TwistDivisor({0}));
    CHECK(c.depth == 1);
}

TEST_CASE("schema errors name the field") {
    CHECK(error_path(R"({"mode": "formal", "n_vars": 1, "blocks": [], "window": {"lo": [3], "hi": [2]}})") ==
          "window.lo[0]");
    CHECK(error_path(R"({"mode": "formal", "n_vars": 1, "blocks": [], "window": {"lo": [0, 0], "hi": [2]}})") ==
          "window.lo");
    CHECK(error_path(R"({"n_vars": 1})") == "mode");
    CHECK(error_path(R"({"mode": "torus"})") == "mode");
    CHECK(error_path(R"({"mode": "formal", "blocks": []})") == "n_vars");
    CHECK(error_path(R"({"mode": "formal", "n_vars": 1, "blocks": [{"residues": ["0.5"]}]})") ==
          "blocks[0].residues[0]");
    CHECK(error_path(R"({"mode": "formal", "n_vars": 1, "blocks": [{"residues": [0.5]}]})") ==
          "blocks[0].residues[0]");
    CHECK(error_path(R"({"mode": "formal", "n_vars": 1, "blocks": [{"colour": 1}]})") == "blocks[0].colour");
    CHECK(error_path(R"({"mode": "formal", "n_vars": 1, "blocks": [{"phi": [{"pole": [0], "coeff": "1"}]}]})") ==
          "blocks[0].phi[0].pole");
    CHECK(error_path(R"({"mode": "formal", "n_vars": 1, "blocks": [{"phi": [{"pole": [1, 1], "coeff": "1"}]}]})") ==
          "blocks[0].phi[0].pole");
    CHECK(error_path(R"({"mode": "formal", "n_vars": 1, "blocks": [{"rank": 2, "nilpotent": [[["1","0"],["0","0"]]]}]})") ==
          "blocks[0]");
    CHECK(error_path(R"({"mode": "formal", "n_vars": 2, "blocks": [], "depth": 1})") == "depth");
    CHECK(error_path(R"({"mode": "formal", "n_vars": 2, "blocks": [], "delta": [1]})") == "delta");
    CHECK(error_path(R"({"mode": "formal", "n_vars": 1, "blocks": [], "suites": ["kclass"]})") == "suites[0]");
    CHECK(error_path(R"({"mode": "curve", "points": ["1"], "summands": []})") == "points[0]");
    CHECK(error_path(R"({"mode": "curve", "points": ["0", "0"], "summands": []})") == "points[1]");
    CHECK(error_path(R"({"mode": "curve", "points": ["inf"], "summands": [{"omega": {"x": "1"}}]})") ==
          "summands[0].omega.x");
    // a pole at 0 while 0 is not marked
    CHECK(error_path(R"({"mode": "curve", "points": ["inf"], "summands": [{"omega": {"-2": "1"}}]})") == "summands");
    CHECK(error_path("[1, 2]") == "");

    CHECK_THROWS_AS(load_spec(CATALOG + "/missing.json"), SchemaError);
}

TEST_CASE("flag overrides are validated") {
    auto s = catalog_spec("bidisc_x1x2");
    CHECK_THROWS_AS(override_depth(s, 1), SchemaError);
    CHECK_THROWS_AS(override_delta(s, {1}), SchemaError);
    CHECK_THROWS_AS(override_delta(s, {1, -1}), SchemaError);
    override_depth(s, 4);
    CHECK(s.depth == 4);
    CHECK_THROWS_AS(run_command("kclass", s, {}), SchemaError);
    CHECK_THROWS_AS(run_command("rees", catalog_spec("trivial_gm"), {}), SchemaError);
    CHECK_THROWS_AS(run_command("frobnicate", s, {}), SchemaError);
}

TEST_CASE("kclass on e^{1/x}") {
    const auto r = run_command("kclass", catalog_spec("exp_1_over_x"), {});
    CHECK(r.exit_code == 0);
    const json& k = item(r.report, "kclass");
    CHECK(k.at("outputs").at("rhs") == json{{"rank", 0}, {"degree", 1}});
    CHECK(k.at("outputs").at("lhs") == json{{"rank", 0}, {"degree", 1}});
    CHECK(item(r.report, "p0").at("outputs").at("found") == true);
    // inputs are embedded
    CHECK(r.report.at("spec").at("summands") == json::parse(R"([{"omega": {"-2": "-1"}}])"));
}

TEST_CASE("irregularity") {
    const auto t = run_command("irregularity", catalog_spec("trivial_gm"), {});
    CHECK(t.exit_code == 0);
    CHECK(item(t.report, "irregularity").at("outputs").at("points") == json{{"0", 0}, {"inf", 0}});
    const auto e = run_command("irregularity", catalog_spec("exp_1_over_x"), {});
    CHECK(item(e.report, "irregularity").at("outputs").at("points") == json{{"0", 1}, {"inf", 0}});
    const auto x3 = run_command("irregularity", catalog_spec("x_inv3"), {});
    CHECK(item(x3.report, "irregularity").at("outputs").at("irregularity") == 3);
    const auto j = run_command("irregularity", catalog_spec("regular_jordan"), {});
    CHECK(item(j.report, "irregularity").at("outputs").at("irregularity") == 0);
}

TEST_CASE("cohomology with window evidence") {
    Flags f;
    f.window_grow = 1;
    const auto r = run_command("cohomology", catalog_spec("exp_1_over_x"), f);
    CHECK(r.exit_code == 0);
    const json& h = item(r.report, "hypercohomology");
    CHECK(h.at("outputs").at("hypercohomology") == json{{"h0", 0}, {"h1", 1}, {"h2", 0}});
    CHECK(h.at("evidence").size() == 4);

    const auto l = run_command("cohomology", catalog_spec("exp_1_over_x_local"), f);
    CHECK(l.exit_code == 0);
    const json& c = item(l.report, "cohomology");
    CHECK(c.at("evidence").size() == 4);
    CHECK(c.at("outputs").at("stable") == true);
    for (const auto& name : {"alpha", "beta"}) CHECK(item(l.report, name).at("evidence").size() == 4);
}

TEST_CASE("reports are deterministic and sorted") {
    Flags quiet;
    quiet.timing = false;
    const auto spec = catalog_spec("exp_1_over_x_local");
    const auto a = run_command("verify", spec, quiet);
    const auto b = run_command("verify", spec, quiet);
    CHECK(a.report.dump() == b.report.dump());
    CHECK(a.exit_code == 0);

    Flags seeded = quiet;
    seeded.seed = 99;
    const auto c = run_command("verify", spec, seeded);
    json ca = c.report, aa = a.report;
    ca.erase("flags");
    aa.erase("flags");
    CHECK(ca == aa);

    std::vector<std::string> names;
    for (const auto& it : a.report.at("items")) names.push_back(it.at("name"));
    CHECK(std::is_sorted(names.begin(), names.end()));

    const auto timed = run_command("tower", spec, {});
    CHECK(item(timed.report, "tower").contains("seconds"));
    CHECK_FALSE(item(without_timing(timed.report), "tower").contains("seconds"));
}

TEST_CASE("rees on the bidisc and strict exit") {
    const auto r = run_command("rees", catalog_spec("bidisc_x1x2"), {});
    CHECK(r.exit_code == 0);
    CHECK(item(r.report, "pipeline").at("outputs").at("pass") == true);

    auto s = catalog_spec("bidisc_x1x2");
    s.suites = {"spencer", "tower"};
    CHECK(run_command("verify", s, {}).exit_code == 0);
    Flags strict;
    strict.strict_exit = true;
    CHECK(run_command("verify", s, strict).exit_code == 1);
}

TEST_CASE("computation failures give exit 1") {
    set_block_dimension_cap(5);
    const auto r = run_command("cohomology", catalog_spec("x_inv3"), {});
    set_block_dimension_cap(0);
    CHECK(r.exit_code == 1);
    CHECK(item(r.report, "cohomology").contains("error"));
}

TEST_CASE("pretty report") {
    const auto r = run_command("kclass", catalog_spec("exp_1_over_x"), {});
    const std::string text = pretty_report(r.report);
    CHECK(text.find("command: kclass  spec: exp_1_over_x  PASS") != std::string::npos);
    CHECK(text.find("rhs: {\"degree\":1,\"rank\":0}") != std::string::npos);
    CHECK_THROWS_AS(pretty_report(json::object()), SchemaError);
}

TEST_CASE("random catalog") {
    const auto a = random_catalog(5, 30), b = random_catalog(5, 30);
    REQUIRE(a.size() == 30);
    std::size_t blocks = 0;
    const std::set<Rational> residues{0, Rational(1, 3), Rational(1, 2)};
    for (std::size_t i = 0; i < a.size(); ++i) {
        REQUIRE(a[i].connection.blocks().size() == b[i].connection.blocks().size());
        for (std::size_t k = 0; k < a[i].connection.blocks().size(); ++k) {
            CHECK(a[i].connection.blocks()[k].phi == b[i].connection.blocks()[k].phi);
            CHECK(a[i].connection.blocks()[k].regular.residues == b[i].connection.blocks()[k].regular.residues);
        }
        CHECK(a[i].connection.n_vars() <= 2);
        for (const auto& blk : a[i].connection.blocks()) {
            ++blocks;
            CHECK(blk.rank() <= 2);
            for (int m : blk.phi.pole_divisor()) CHECK((m >= 1 && m <= 3));
            for (const auto& r : blk.regular.residues) CHECK(residues.count(r) == 1);
        }
    }
    CHECK(blocks >= 25);
}

TEST_CASE("command line exit codes") {
    CHECK(run_tool("kclass " + CATALOG + "/exp_1_over_x.json") == 0);
    CHECK(run_tool("irregularity " + CATALOG + "/trivial_gm.json") == 0);
    const std::string bad = write_temp("bad_window", R"({"mode": "curve", "points": ["0"], "summands": [],
        "window": {"lo": [5], "hi": [-5]}})");
    CHECK(run_tool("tower " + bad) == 2);
    CHECK(run_tool("tower " + CATALOG + "/x_inv3.json --depth -1") == 2);
    CHECK(run_tool("rees " + CATALOG + "/exp_1_over_x.json") == 2);
    CHECK(run_tool("tower " + CATALOG + "/x_inv3.json", "LOGLATTICE_MAX_DIM=abc") == 2);
    CHECK(run_tool("cohomology " + CATALOG + "/x_inv3.json", "LOGLATTICE_MAX_DIM=5") == 1);
    CHECK(run_tool("nonsense") == 2);
    const std::string out = "test_cli_report.json";
    CHECK(run_tool("kclass " + CATALOG + "/exp_1_over_x.json -o " + out) == 0);
    CHECK(run_tool("report " + out) == 0);
    CHECK(run_tool("report " + bad) == 2);
}
