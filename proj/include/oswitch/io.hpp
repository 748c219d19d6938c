#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "oswitch/model.hpp"
#include "oswitch/solver.hpp"
#include "oswitch/strategy.hpp"

namespace oswitch {

/// Where to start solving/evaluating: a node and the mode held there.
struct Anchor {
    int node = 0;
    int mode = 0;

    friend bool operator==(const Anchor&, const Anchor&) = default;
};

/// A problem file: model plus an optional default anchor.
struct Instance {
    SwitchingModel model;
    std::optional<Anchor> anchor;
};

/// A strategy file: start point plus switch events.
struct StrategyDocument {
    Anchor start;
    std::vector<SwitchEvent> switches;
};

/// Thrown on malformed documents (JSON errors, missing or mistyped fields).
/// Distinct from std::invalid_argument so callers can map parse failures and
/// semantic failures to different exit codes.
class ParseError : public std::runtime_error {
  public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

/// Instance documents are JSON with three sections:
///   tree:   { horizon, nodes: [{id, time, parent, prob}, ...] }
///   model:  { num_modes, psi: [[per mode] per node],
///             gamma: [[[to] from] per node], terminal: {"leaf id": [per mode]} }
///   anchor: { node, mode }   (optional)
/// Numbers round-trip exactly: writing uses the shortest decimal form that
/// parses back to the same double (at most 17 significant digits).
/// read_instance accepts structurally well-formed trees whose semantic
/// validity is still up to validate_tree/validate_model.
Instance read_instance(std::istream& in);
Instance read_instance_file(const std::string& path);
std::string write_instance(const Instance& instance);

/// Strategy documents: { start: {node, mode},
///                       switches: [{node, from, to}, ...] }.
StrategyDocument read_strategy(std::istream& in);
StrategyDocument read_strategy_file(const std::string& path);
std::string write_strategy(const StrategyDocument& doc);

/// Result documents emitted by the solve command.
struct SolveResult {
    std::string variant;  // "explicit" or "implicit"
    const ValueField* values = nullptr;
    std::optional<Anchor> anchor;
    std::optional<std::vector<SwitchEvent>> switches;
    std::optional<double> value;
    std::optional<EquivalenceReport> report;
};
std::string write_solve_result(const SolveResult& result);

/// One number serialized exactly as documents serialize it (shortest decimal
/// form that parses back to the same double).
std::string write_value(double value);

/// Comparison document for the oracle command.
std::string write_oracle_report(const Anchor& anchor, double oracle_value, double dp_value,
                                double abs_difference);

/// Writes text to the path atomically: temp file in the same directory, then
/// rename. Throws std::runtime_error on I/O failure.
void write_file_atomic(const std::string& path, const std::string& text);

}  // namespace oswitch
