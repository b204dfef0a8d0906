#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "loglattice/errors.hpp"
#include "loglattice/sparse_matrix.hpp"
#include "runner.hpp"

using namespace loglattice;
using namespace loglattice::cli;

namespace {

struct Options {
    Flags flags;
    std::string spec_path;
    std::string output;
    std::vector<int> delta;
    int depth = -1;
    std::uint64_t seed = 0;
    bool no_timing = false;
};

void add_common(CLI::App* sub, Options& o) {
    sub->add_option("--window-grow", o.flags.window_grow, "Extra window enlargement rounds");
    sub->add_option("--depth", o.depth, "Tower depth (overrides the spec)");
    sub->add_option("--delta", o.delta, "Twist multiplicities, one per boundary component")->expected(1, -1);
    sub->add_option("--seed", o.seed, "Permute evaluation order; draws the random catalog of verify");
    sub->add_flag("--strict-exit", o.flags.strict_exit, "Skipped suites count as failures");
    sub->add_flag("--no-timing", o.no_timing, "Leave timing fields out of the report");
    sub->add_option("-o,--output", o.output, "Write the report here instead of stdout");
}

void apply_env() {
    const char* cap = std::getenv("LOGLATTICE_MAX_DIM");
    if (!cap || !*cap) return;
    std::size_t used = 0;
    unsigned long v = 0;
    try {
        v = std::stoul(cap, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != std::string(cap).size()) throw SchemaError("LOGLATTICE_MAX_DIM", "expected a nonnegative integer");
    set_block_dimension_cap(v);
}

void emit(const json& report, const std::string& output) {
    const std::string text = report.dump(2) + "\n";
    if (output.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(output);
    if (!out) throw std::runtime_error("cannot write " + output);
    out << text;
}

void diagnose(const json& report) {
    for (const auto& it : report.at("items")) {
        if (it.value("pass", false)) continue;
        const std::string name = it.value("name", std::string());
        if (it.contains("error")) {
            std::cerr << "FAIL " << name << ": " << it["error"].get<std::string>() << "\n";
            continue;
        }
        const json& o = it.value("outputs", json::object());
        bool said = false;
        if (o.contains("entries"))
            for (const auto& e : o["entries"])
                if (!e.value("pass", true)) {
                    std::cerr << "FAIL " << name << " [" << e.value("label", std::string()) << "] dims "
                              << e.value("dims", json::object()).dump() << " " << e.value("detail", std::string())
                              << "\n";
                    said = true;
                }
        if (!said) std::cerr << "FAIL " << name << ": " << o.dump() << "\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Logarithmic and good models of irregular flat connections"};
    app.require_subcommand(1);
    Options o;
    std::string report_path;

    for (const auto& name : spec_commands()) {
        auto* sub = app.add_subcommand(name, name == "verify" ? "Run the spec's suites, or the acceptance suite"
                                                               : "Run " + name + " on a spec file");
        auto* spec = sub->add_option("spec", o.spec_path, "Spec file (JSON)");
        if (name != "verify") spec->required();
        add_common(sub, o);
    }
    auto* rep = app.add_subcommand("report", "Pretty-print a stored report");
    rep->add_option("report", report_path, "Report file (JSON)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (rep->parsed()) {
            std::ifstream in(report_path);
            if (!in) throw SchemaError("", "cannot read " + report_path);
            json r;
            try {
                r = json::parse(in);
            } catch (const json::parse_error& e) {
                throw SchemaError("", std::string("malformed JSON: ") + e.what());
            }
            std::cout << pretty_report(r);
            return exit_code_of(r, false);
        }

        apply_env();
        const std::string command = app.get_subcommands().front()->get_name();
        if (o.depth >= 0 || app.get_subcommands().front()->count("--depth")) o.flags.depth = o.depth;
        if (!o.delta.empty()) o.flags.delta = o.delta;
        if (app.get_subcommands().front()->count("--seed")) o.flags.seed = o.seed;
        o.flags.timing = !o.no_timing;

        RunResult r = command == "verify" && o.spec_path.empty() ? run_acceptance_command(o.flags)
                                                                  : run_command(command, load_spec(o.spec_path), o.flags);
        emit(r.report, o.output);
        diagnose(r.report);
        return r.exit_code;
    } catch (const SchemaError& e) {
        std::cerr << "schema error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
