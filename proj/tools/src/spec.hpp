#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "loglattice/connection.hpp"
#include "loglattice/geometry.hpp"
#include "loglattice/weight_window.hpp"

namespace loglattice::cli {

using nlohmann::json;

/// Input that does not match the spec schema. `path` names the offending field,
/// e.g. "window.lo[0]" or "blocks[1].residues".
class SchemaError : public std::runtime_error {
public:
    SchemaError(std::string path, const std::string& what)
        : std::runtime_error(path.empty() ? what : path + ": " + what), path_(std::move(path)) {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

enum class Mode { Formal, Curve };

struct SpecDocument {
    std::string name;
    Mode mode = Mode::Formal;
    FormalConnection formal;  // mode formal
    CurveConnection curve;    // mode curve
    WeightWindow window;
    TwistDivisor delta;
    int depth = 0;
    std::vector<std::string> suites;
    /// The document as read, embedded in every report.
    json source;

    /// Variables of the formal polydisc, 1 for a curve.
    std::size_t n_vars() const;
    /// Components of the boundary (branches or marked points).
    std::size_t boundary_size() const;
};

/// Every suite a spec of this mode may request, in canonical order.
const std::vector<std::string>& known_suites(Mode m);

/// Validates and converts. Missing optional fields get defaults: window [-12, 12] per
/// variable, delta 1 per branch (formal) or 0 per point (curve), depth max(n_vars, 3)
/// (formal) or 1 (curve), every known suite that applies (the one-variable suites
/// filtered_qis and spencer are left out when n_vars > 1).
SpecDocument parse_spec(const json& j, const std::string& default_name = "spec");
/// Reads a file; a missing file or malformed JSON is a SchemaError at path "".
SpecDocument load_spec(const std::string& path);

/// Replaces depth / delta, with the same validation as the file fields.
void override_depth(SpecDocument& s, int depth);
void override_delta(SpecDocument& s, const std::vector<int>& delta);

/// "p/q" strings or JSON integers; anything else is a SchemaError at `path`.
Rational parse_rational_field(const json& j, const std::string& path);

}  // namespace loglattice::cli
