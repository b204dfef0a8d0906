#include "spec.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>

#include "loglattice/errors.hpp"

namespace loglattice::cli {

namespace {

std::string at(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
std::string at(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

const json& require(const json& obj, const std::string& path, const std::string& key) {
    if (!obj.contains(key)) throw SchemaError(at(path, key), "required field is missing");
    return obj.at(key);
}

const json& require_array(const json& j, const std::string& path) {
    if (!j.is_array()) throw SchemaError(path, "expected an array");
    return j;
}

long as_int(const json& j, const std::string& path, long lo = std::numeric_limits<int>::min(),
            long hi = std::numeric_limits<int>::max()) {
    if (!j.is_number_integer()) throw SchemaError(path, "expected an integer");
    const long v = j.get<long>();
    if (v < lo || v > hi)
        throw SchemaError(path, "value " + std::to_string(v) + " outside [" + std::to_string(lo) + ", " +
                                    std::to_string(hi) + "]");
    return v;
}

std::string as_string(const json& j, const std::string& path) {
    if (!j.is_string()) throw SchemaError(path, "expected a string");
    return j.get<std::string>();
}

std::vector<int> int_vector(const json& j, const std::string& path, std::size_t n, long lo = -100000,
                            long hi = 100000) {
    require_array(j, path);
    if (j.size() != n)
        throw SchemaError(path, "expected " + std::to_string(n) + " entries, found " + std::to_string(j.size()));
    std::vector<int> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(static_cast<int>(as_int(j[i], at(path, i), lo, hi)));
    return out;
}

const std::set<std::string> FORMAL_KEYS{"name", "mode", "n_vars", "blocks", "window", "delta", "depth", "suites"};
const std::set<std::string> CURVE_KEYS{"name", "mode", "points", "summands", "window", "delta", "depth", "suites"};

void reject_unknown(const json& j, const std::string& path, const std::set<std::string>& keys) {
    for (const auto& [k, v] : j.items())
        if (!keys.count(k)) throw SchemaError(at(path, k), "unknown field");
}

DenseMatrixQ parse_matrix(const json& j, const std::string& path, std::size_t r) {
    require_array(j, path);
    if (j.size() != r) throw SchemaError(path, "expected " + std::to_string(r) + " rows");
    DenseMatrixQ m;
    for (std::size_t i = 0; i < r; ++i) {
        const std::string p = at(path, i);
        require_array(j[i], p);
        if (j[i].size() != r) throw SchemaError(p, "expected " + std::to_string(r) + " columns");
        std::vector<Rational> row;
        for (std::size_t c = 0; c < r; ++c) row.push_back(parse_rational_field(j[i][c], at(p, c)));
        m.push_back(row);
    }
    return m;
}

ElementaryModel parse_block(const json& j, const std::string& path, std::size_t n) {
    if (!j.is_object()) throw SchemaError(path, "expected an object");
    reject_unknown(j, path, {"phi", "rank", "residues", "nilpotent"});
    ElementaryModel blk{ExponentialFactor(n), {}};
    if (j.contains("phi")) {
        const std::string pp = at(path, "phi");
        const json& phi = require_array(j.at("phi"), pp);
        for (std::size_t t = 0; t < phi.size(); ++t) {
            const std::string tp = at(pp, t);
            if (!phi[t].is_object()) throw SchemaError(tp, "expected an object");
            reject_unknown(phi[t], tp, {"pole", "coeff"});
            const auto pole = int_vector(require(phi[t], tp, "pole"), at(tp, "pole"), n, 0, 1000);
            if (std::all_of(pole.begin(), pole.end(), [](int v) { return v == 0; }))
                throw SchemaError(at(tp, "pole"), "a constant term is not an exponential factor");
            blk.phi.add_term(Exponent(pole.begin(), pole.end()), parse_rational_field(require(phi[t], tp, "coeff"),
                                                                                         at(tp, "coeff")));
        }
    }
    const std::size_t rank =
        j.contains("rank") ? static_cast<std::size_t>(as_int(j.at("rank"), at(path, "rank"), 1, 64)) : 1;
    blk.regular.rank = rank;
    const std::string rp = at(path, "residues");
    if (!j.contains("residues")) {
        blk.regular.residues.assign(n, Rational(0));
    } else if (j.at("residues").is_array()) {
        const json& r = j.at("residues");
        if (r.size() != n) throw SchemaError(rp, "expected " + std::to_string(n) + " entries");
        for (std::size_t i = 0; i < n; ++i) blk.regular.residues.push_back(parse_rational_field(r[i], at(rp, i)));
    } else {
        blk.regular.residues.assign(n, parse_rational_field(j.at("residues"), rp));
    }
    if (j.contains("nilpotent")) {
        const std::string np = at(path, "nilpotent");
        const json& nil = require_array(j.at("nilpotent"), np);
        if (nil.size() != n) throw SchemaError(np, "expected one matrix per variable");
        for (std::size_t i = 0; i < n; ++i) blk.regular.nilpotent.push_back(parse_matrix(nil[i], at(np, i), rank));
    }
    try {
        blk.regular.validate(n);
    } catch (const InvalidArgument& e) {
        throw SchemaError(path, e.what());
    }
    return blk;
}

RankOneForm parse_summand(const json& j, const std::string& path) {
    if (!j.is_object()) throw SchemaError(path, "expected an object");
    reject_unknown(j, path, {"omega"});
    const std::string op = at(path, "omega");
    const json& o = require(j, path, "omega");
    if (!o.is_object()) throw SchemaError(op, "expected an object mapping exponents to coefficients");
    RankOneForm f;
    for (const auto& [k, v] : o.items()) {
        const std::string kp = at(op, k);
        std::size_t used = 0;
        int e = 0;
        try {
            e = std::stoi(k, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != k.size() || k.empty()) throw SchemaError(kp, "exponent key must be an integer");
        const Rational c = parse_rational_field(v, kp);
        if (c != 0) f.coeffs[e] = c;
    }
    return f;
}

void check_depth(const SpecDocument& s, int depth, const std::string& path) {
    const int need = s.mode == Mode::Formal ? static_cast<int>(s.n_vars()) : 1;
    if (depth < need)
        throw SchemaError(path, "depth " + std::to_string(depth) + " is below the required " + std::to_string(need));
    if (depth > 64) throw SchemaError(path, "depth above 64");
}

}  // namespace

std::size_t SpecDocument::n_vars() const { return mode == Mode::Formal ? formal.n_vars() : 1; }

std::size_t SpecDocument::boundary_size() const {
    return mode == Mode::Formal ? formal.n_vars() : curve.boundary().size();
}

const std::vector<std::string>& known_suites(Mode m) {
    static const std::vector<std::string> formal{"alpha",    "beta",         "cohomology",   "euler",
                                                 "filtered_qis", "irregularity", "localization", "pipeline",
                                                 "spencer",  "tensor_image", "tower"};
    static const std::vector<std::string> curve{"hypercohomology", "irregularity", "kclass", "p0", "tower"};
    return m == Mode::Formal ? formal : curve;
}

Rational parse_rational_field(const json& j, const std::string& path) {
    if (j.is_number_integer()) return Rational(j.get<long>());
    if (!j.is_string()) throw SchemaError(path, "expected a rational as a \"p/q\" string or an integer");
    try {
        return parse_rational(j.get<std::string>());
    } catch (const Error& e) {
        throw SchemaError(path, e.what());
    }
}

SpecDocument parse_spec(const json& j, const std::string& default_name) {
    if (!j.is_object()) throw SchemaError("", "the spec must be a JSON object");
    SpecDocument s;
    s.source = j;
    s.name = j.contains("name") ? as_string(j.at("name"), "name") : default_name;
    const std::string mode = as_string(require(j, "", "mode"), "mode");
    if (mode == "formal") {
        s.mode = Mode::Formal;
    } else if (mode == "curve") {
        s.mode = Mode::Curve;
    } else {
        throw SchemaError("mode", "expected \"formal\" or \"curve\", found \"" + mode + "\"");
    }
    reject_unknown(j, "", s.mode == Mode::Formal ? FORMAL_KEYS : CURVE_KEYS);

    if (s.mode == Mode::Formal) {
        const std::size_t n = static_cast<std::size_t>(as_int(require(j, "", "n_vars"), "n_vars", 1, 4));
        std::vector<ElementaryModel> blocks;
        const json& b = require_array(require(j, "", "blocks"), "blocks");
        for (std::size_t i = 0; i < b.size(); ++i) blocks.push_back(parse_block(b[i], at("blocks", i), n));
        s.formal = FormalConnection(n, std::move(blocks));
        if (!s.formal.is_good()) throw SchemaError("blocks", "some exponential factor is not good");
    } else {
        std::vector<P1Point> pts;
        const json& p = require_array(require(j, "", "points"), "points");
        if (p.empty()) throw SchemaError("points", "the boundary must be nonempty");
        for (std::size_t i = 0; i < p.size(); ++i) {
            const std::string v = as_string(p[i], at("points", i));
            if (v != "0" && v != "inf") throw SchemaError(at("points", i), "only \"0\" and \"inf\" are supported");
            const P1Point pt = v == "0" ? P1Point::at(0) : P1Point::at_infinity();
            if (std::find(pts.begin(), pts.end(), pt) != pts.end()) throw SchemaError(at("points", i), "repeated point");
            pts.push_back(pt);
        }
        std::vector<RankOneForm> summands;
        const json& sm = require_array(require(j, "", "summands"), "summands");
        for (std::size_t i = 0; i < sm.size(); ++i) summands.push_back(parse_summand(sm[i], at("summands", i)));
        try {
            s.curve = CurveConnection(BoundaryDivisor(pts), std::move(summands));
        } catch (const InvalidArgument& e) {
            throw SchemaError("summands", e.what());
        }
    }

    const std::size_t n = s.n_vars();
    if (j.contains("window")) {
        const json& w = j.at("window");
        if (!w.is_object()) throw SchemaError("window", "expected an object with lo and hi");
        reject_unknown(w, "window", {"lo", "hi"});
        const auto lo = int_vector(require(w, "window", "lo"), "window.lo", n, -10000, 10000);
        const auto hi = int_vector(require(w, "window", "hi"), "window.hi", n, -10000, 10000);
        for (std::size_t i = 0; i < n; ++i)
            if (lo[i] > hi[i])
                throw SchemaError(at("window.lo", i), "lo " + std::to_string(lo[i]) + " > hi " + std::to_string(hi[i]));
        s.window = WeightWindow(Exponent(lo.begin(), lo.end()), Exponent(hi.begin(), hi.end()));
    } else {
        s.window = WeightWindow::cube(n, -12, 12);
    }

    if (j.contains("delta")) {
        s.delta = TwistDivisor(int_vector(j.at("delta"), "delta", s.boundary_size(), 0, 1000));
    } else {
        s.delta = TwistDivisor::multiple(s.boundary_size(), s.mode == Mode::Formal ? 1 : 0);
    }

    if (j.contains("depth")) {
        s.depth = static_cast<int>(as_int(j.at("depth"), "depth"));
        check_depth(s, s.depth, "depth");
    } else {
        s.depth = s.mode == Mode::Formal ? std::max(static_cast<int>(n), 3) : 1;
    }

    const auto& known = known_suites(s.mode);
    if (j.contains("suites")) {
        const json& su = require_array(j.at("suites"), "suites");
        std::set<std::string> seen;
        for (std::size_t i = 0; i < su.size(); ++i) {
            const std::string v = as_string(su[i], at("suites", i));
            if (std::find(known.begin(), known.end(), v) == known.end())
                throw SchemaError(at("suites", i), "unknown suite \"" + v + "\" for this mode");
            if (seen.insert(v).second) s.suites.push_back(v);
        }
    } else {
        for (const auto& k : known)
            if (n == 1 || (k != "filtered_qis" && k != "spencer")) s.suites.push_back(k);
    }
    return s;
}

SpecDocument load_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("", "cannot read " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw SchemaError("", std::string("malformed JSON: ") + e.what());
    }
    return parse_spec(j, std::filesystem::path(path).stem().string());
}

void override_depth(SpecDocument& s, int depth) {
    check_depth(s, depth, "--depth");
    s.depth = depth;
}

void override_delta(SpecDocument& s, const std::vector<int>& delta) {
    if (delta.size() != s.boundary_size())
        throw SchemaError("--delta", "expected " + std::to_string(s.boundary_size()) + " multiplicities");
    for (std::size_t i = 0; i < delta.size(); ++i)
        if (delta[i] < 0) throw SchemaError(at("--delta", i), "multiplicities must be >= 0");
    s.delta = TwistDivisor(delta);
}

}  // namespace loglattice::cli
