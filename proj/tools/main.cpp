// Command-line front end: validate / solve / evaluate / oracle / generate.
// Exit codes: 0 success, 1 semantic failure (validation, admissibility,
// tolerance, budget), 2 I/O or document parse failure.

#include <cstdint>
#include <cmath>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "oswitch/generators.hpp"
#include "oswitch/io.hpp"
#include "oswitch/oracle.hpp"
#include "oswitch/solver.hpp"
#include "oswitch/strategy.hpp"
#include "oswitch/tolerances.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kSemanticFailure = 1;
constexpr int kParseFailure = 2;

struct AnchorFlag {
    bool set = false;
    int node = 0;
    int mode = 0;
};

/// NODE:MODE, both integers.
bool parse_anchor(const std::string& text, AnchorFlag& out) {
    auto colon = text.find(':');
    if (colon == std::string::npos) return false;
    try {
        size_t pos = 0;
        out.node = std::stoi(text.substr(0, colon), &pos);
        if (pos != colon) return false;
        std::string rest = text.substr(colon + 1);
        out.mode = std::stoi(rest, &pos);
        if (pos != rest.size()) return false;
    } catch (const std::exception&) {
        return false;
    }
    out.set = true;
    return true;
}

/// LO:HI, both numbers.
bool parse_range(const std::string& text, std::pair<double, double>& out) {
    auto colon = text.find(':');
    if (colon == std::string::npos) return false;
    try {
        size_t pos = 0;
        std::string lo = text.substr(0, colon);
        std::string hi = text.substr(colon + 1);
        out.first = std::stod(lo, &pos);
        if (pos != lo.size()) return false;
        out.second = std::stod(hi, &pos);
        if (pos != hi.size()) return false;
    } catch (const std::exception&) {
        return false;
    }
    return true;
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty())
        std::cout << text;
    else
        oswitch::write_file_atomic(out_path, text);
}

/// Instance must pass both validators before any solving; violations go to
/// stderr and turn into exit code 1.
bool validated(const oswitch::Instance& inst) {
    auto tree_violations = oswitch::validate_tree(*inst.model.tree);
    auto model_violations = oswitch::validate_model(inst.model);
    for (const auto& v : tree_violations) std::cerr << v << "\n";
    for (const auto& v : model_violations) std::cerr << v << "\n";
    return tree_violations.empty() && model_violations.empty();
}

std::optional<oswitch::Anchor> pick_anchor(const oswitch::Instance& inst,
                                           const AnchorFlag& flag) {
    if (flag.set) return oswitch::Anchor{flag.node, flag.mode};
    return inst.anchor;
}

bool anchor_in_range(const oswitch::Anchor& a, const oswitch::SwitchingModel& model) {
    if (a.node < 0 || a.node >= model.tree->num_nodes()) {
        std::cerr << "anchor node " << a.node << " out of range\n";
        return false;
    }
    if (a.mode < 0 || a.mode >= model.num_modes) {
        std::cerr << "anchor mode " << a.mode << " out of range\n";
        return false;
    }
    return true;
}

int run_validate(const std::string& instance_path) {
    oswitch::Instance inst = oswitch::read_instance_file(instance_path);
    auto tree_violations = oswitch::validate_tree(*inst.model.tree);
    auto model_violations = oswitch::validate_model(inst.model);
    for (const auto& v : tree_violations) std::cout << v << "\n";
    for (const auto& v : model_violations) std::cout << v << "\n";
    return (tree_violations.empty() && model_violations.empty()) ? kOk : kSemanticFailure;
}

int run_solve(const std::string& instance_path, bool implicit, bool report,
              const AnchorFlag& anchor_flag, const std::string& out_path) {
    oswitch::Instance inst = oswitch::read_instance_file(instance_path);
    if (!validated(inst)) return kSemanticFailure;

    oswitch::ValueField vf = implicit ? oswitch::backward_induction_implicit(inst.model)
                                      : oswitch::backward_induction_explicit(inst.model);
    oswitch::SolveResult result;
    result.variant = implicit ? "implicit" : "explicit";
    result.values = &vf;
    if (auto anchor = pick_anchor(inst, anchor_flag)) {
        if (!anchor_in_range(*anchor, inst.model)) return kSemanticFailure;
        oswitch::Strategy s = oswitch::extract_strategy(vf, anchor->node, anchor->mode);
        result.anchor = *anchor;
        result.switches = s.switch_events();
        result.value = oswitch::evaluate(s, inst.model);
    }
    if (report) result.report = oswitch::equivalence_report(inst.model);
    emit(oswitch::write_solve_result(result), out_path);
    return kOk;
}

int run_evaluate(const std::string& instance_path, const std::string& strategy_path,
                 const std::string& out_path) {
    oswitch::Instance inst = oswitch::read_instance_file(instance_path);
    oswitch::StrategyDocument doc = oswitch::read_strategy_file(strategy_path);
    if (!validated(inst)) return kSemanticFailure;
    if (!anchor_in_range(doc.start, inst.model)) return kSemanticFailure;

    oswitch::Strategy s =
        oswitch::strategy_from_events(inst.model.tree, doc.start.node, doc.start.mode,
                                      doc.switches, inst.model.num_modes);
    double value = oswitch::evaluate(s, inst.model);
    emit("{\n  \"value\": " + oswitch::write_value(value) + "\n}\n", out_path);
    return kOk;
}

int run_oracle(const std::string& instance_path, const AnchorFlag& anchor_flag,
               long long budget_flag, const std::string& out_path) {
    oswitch::Instance inst = oswitch::read_instance_file(instance_path);
    if (!validated(inst)) return kSemanticFailure;

    oswitch::Anchor anchor =
        pick_anchor(inst, anchor_flag).value_or(oswitch::Anchor{inst.model.tree->root(), 0});
    if (!anchor_in_range(anchor, inst.model)) return kSemanticFailure;

    oswitch::EnumerationBudget budget;
    if (budget_flag > 0) budget.max_assignments = budget_flag;

    oswitch::OracleResult oracle =
        oswitch::enumerate_optimum(inst.model, anchor.node, anchor.mode, budget);
    oswitch::ValueField vf = oswitch::backward_induction_explicit(inst.model);
    double dp = vf.y_at(anchor.node, anchor.mode);
    double diff = std::abs(oracle.value - dp);

    emit(oswitch::write_oracle_report(anchor, oracle.value, dp, diff), out_path);
    return diff < oswitch::kValueTol ? kOk : kSemanticFailure;
}

int run_generate(const oswitch::GeneratorSpec& spec, const AnchorFlag& anchor_flag,
                 const std::string& out_path) {
    oswitch::Instance inst{oswitch::gen_instance(spec), std::nullopt};
    if (anchor_flag.set) {
        oswitch::Anchor anchor{anchor_flag.node, anchor_flag.mode};
        if (!anchor_in_range(anchor, inst.model)) return kSemanticFailure;
        inst.anchor = anchor;
    }
    emit(oswitch::write_instance(inst), out_path);
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Finite-horizon optimal switching on scenario trees"};
    app.require_subcommand(1);

    std::string instance_path, strategy_path, out_path;
    std::string anchor_text, branching_text, psi_text, terminal_text, gamma_text;
    bool implicit = false, report = false;
    long long budget_flag = 0;
    int horizon = 2, modes = 2;
    std::uint64_t seed = 0;

    auto* validate_cmd = app.add_subcommand("validate", "Check an instance file");
    validate_cmd->add_option("instance", instance_path, "instance file")->required();

    auto* solve_cmd = app.add_subcommand("solve", "Solve an instance");
    solve_cmd->add_option("instance", instance_path, "instance file")->required();
    solve_cmd->add_flag("--implicit", implicit, "use the implicit recursion");
    solve_cmd->add_flag("--report", report, "append identity deviation report");
    solve_cmd->add_option("--anchor", anchor_text, "start as NODE:MODE");
    solve_cmd->add_option("--out", out_path, "write result here (atomic)");

    auto* evaluate_cmd = app.add_subcommand("evaluate", "Evaluate a strategy file");
    evaluate_cmd->add_option("instance", instance_path, "instance file")->required();
    evaluate_cmd->add_option("strategy", strategy_path, "strategy file")->required();
    evaluate_cmd->add_option("--out", out_path, "write result here (atomic)");

    auto* oracle_cmd = app.add_subcommand("oracle", "Brute-force check against the solver");
    oracle_cmd->add_option("instance", instance_path, "instance file")->required();
    oracle_cmd->add_option("--anchor", anchor_text, "start as NODE:MODE");
    oracle_cmd->add_option("--budget", budget_flag, "max enumerated candidates");
    oracle_cmd->add_option("--out", out_path, "write result here (atomic)");

    auto* generate_cmd = app.add_subcommand("generate", "Emit a random valid instance");
    generate_cmd->add_option("--horizon", horizon, "number of time steps");
    generate_cmd->add_option("--branching", branching_text,
                             "children per level, e.g. 2 or 2,1,2");
    generate_cmd->add_option("--modes", modes, "number of modes");
    generate_cmd->add_option("--psi-range", psi_text, "running reward range LO:HI");
    generate_cmd->add_option("--terminal-range", terminal_text, "terminal reward range LO:HI");
    generate_cmd->add_option("--gamma-range", gamma_text, "switching cost range LO:HI");
    generate_cmd->add_option("--seed", seed, "random seed");
    generate_cmd->add_option("--anchor", anchor_text, "embed anchor NODE:MODE");
    generate_cmd->add_option("--out", out_path, "write instance here (atomic)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kParseFailure;
    }

    AnchorFlag anchor_flag;
    if (!anchor_text.empty() && !parse_anchor(anchor_text, anchor_flag)) {
        std::cerr << "--anchor expects NODE:MODE, got \"" << anchor_text << "\"\n";
        return kParseFailure;
    }

    try {
        if (validate_cmd->parsed()) return run_validate(instance_path);
        if (solve_cmd->parsed())
            return run_solve(instance_path, implicit, report, anchor_flag, out_path);
        if (evaluate_cmd->parsed()) return run_evaluate(instance_path, strategy_path, out_path);
        if (oracle_cmd->parsed())
            return run_oracle(instance_path, anchor_flag, budget_flag, out_path);
        if (generate_cmd->parsed()) {
            oswitch::GeneratorSpec spec;
            spec.horizon = horizon;
            spec.num_modes = modes;
            spec.seed = seed;
            if (branching_text.empty()) {
                spec.branching.assign(static_cast<size_t>(std::max(horizon, 0)), 1);
            } else {
                std::string rest = branching_text;
                std::vector<int> parsed;
                while (!rest.empty()) {
                    auto comma = rest.find(',');
                    std::string tok = rest.substr(0, comma);
                    try {
                        size_t pos = 0;
                        parsed.push_back(std::stoi(tok, &pos));
                        if (pos != tok.size()) throw std::invalid_argument(tok);
                    } catch (const std::exception&) {
                        std::cerr << "--branching expects integers, got \"" << tok << "\"\n";
                        return kParseFailure;
                    }
                    if (comma == std::string::npos) break;
                    rest = rest.substr(comma + 1);
                }
                // A single factor is shorthand for the same factor at every level.
                if (parsed.size() == 1)
                    spec.branching.assign(static_cast<size_t>(std::max(horizon, 0)), parsed[0]);
                else
                    spec.branching = std::move(parsed);
            }
            if (!psi_text.empty() && !parse_range(psi_text, spec.psi_range)) {
                std::cerr << "--psi-range expects LO:HI\n";
                return kParseFailure;
            }
            if (!terminal_text.empty() && !parse_range(terminal_text, spec.terminal_range)) {
                std::cerr << "--terminal-range expects LO:HI\n";
                return kParseFailure;
            }
            if (!gamma_text.empty() && !parse_range(gamma_text, spec.gamma_range)) {
                std::cerr << "--gamma-range expects LO:HI\n";
                return kParseFailure;
            }
            return run_generate(spec, anchor_flag, out_path);
        }
    } catch (const oswitch::ParseError& e) {
        std::cerr << e.what() << "\n";
        return kParseFailure;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kSemanticFailure;
    }
    return kOk;
}
