#include "oswitch/oracle.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "oswitch/tolerances.hpp"

namespace oswitch {

namespace {

void require_structure(const ScenarioTree& tree, int num_modes, const EnumerationBudget& budget) {
    if (tree.horizon() > budget.max_horizon)
        throw BudgetExceeded(tree.horizon(), budget.max_horizon);
    if (num_modes > budget.max_modes) throw BudgetExceeded(num_modes, budget.max_modes);
    for (const Node& nd : tree.nodes())
        if (static_cast<int>(tree.children(nd.id).size()) > budget.max_branching)
            throw BudgetExceeded(static_cast<long long>(tree.children(nd.id).size()),
                                 budget.max_branching);
}

/// Number of stopping rules on the subtree at `id`: stop here, or defer and
/// cut every child branch independently. Saturates at `cap + 1` to avoid
/// overflow.
long long count_stopping_rules(const ScenarioTree& tree, int id, long long cap) {
    if (tree.is_leaf(id)) return 1;
    long long defer = 1;
    for (int c : tree.children(id)) {
        defer *= count_stopping_rules(tree, c, cap);
        if (defer > cap) return cap + 1;
    }
    return std::min(defer + 1, cap + 1);
}

}  // namespace

OracleResult enumerate_optimum(const SwitchingModel& model, int start_node, int start_mode,
                               const EnumerationBudget& budget) {
    const ScenarioTree& tree = *model.tree;
    const int m = model.num_modes;
    if (start_node < 0 || start_node >= tree.num_nodes())
        throw std::invalid_argument("start node " + std::to_string(start_node) + " out of range");
    if (start_mode < 0 || start_mode >= m)
        throw std::invalid_argument("start mode " + std::to_string(start_mode) + " out of range");
    require_structure(tree, m, budget);

    std::vector<int> decision_nodes;
    for (int id : tree.subtree(start_node))
        if (tree.node(id).time < tree.horizon()) decision_nodes.push_back(id);

    long long total = 1;
    for (size_t k = 0; k < decision_nodes.size(); ++k) {
        total *= m;
        if (total > budget.max_assignments)
            throw BudgetExceeded(total, budget.max_assignments);
    }

    Strategy candidate;
    candidate.tree = model.tree;
    candidate.start_node = start_node;
    candidate.start_mode = start_mode;
    candidate.mode_assignment.assign(static_cast<size_t>(tree.num_nodes()), Strategy::kUnassigned);
    for (int id : decision_nodes) candidate.mode_assignment[static_cast<size_t>(id)] = 0;

    OracleResult best;
    best.value = evaluate(candidate, model);
    best.argmax = candidate;

    // Odometer over mode assignments in lexicographic order; strict
    // improvement keeps the earliest argmax.
    std::vector<int> digits(decision_nodes.size(), 0);
    while (true) {
        size_t pos = digits.size();
        bool carried = true;
        while (pos > 0 && carried) {
            --pos;
            if (++digits[pos] < m)
                carried = false;
            else
                digits[pos] = 0;
        }
        if (carried) break;  // wrapped around: every assignment visited
        for (size_t k = 0; k < decision_nodes.size(); ++k)
            candidate.mode_assignment[static_cast<size_t>(decision_nodes[k])] = digits[k];
        double v = evaluate(candidate, model);
        if (v > best.value) {
            best.value = v;
            best.argmax = candidate;
        }
    }
    return best;
}

std::vector<StoppingRule> enumerate_stopping_rules(const ScenarioTree& tree, int anchor,
                                                   const EnumerationBudget& budget) {
    if (anchor < 0 || anchor >= tree.num_nodes())
        throw std::invalid_argument("anchor " + std::to_string(anchor) + " out of range");
    long long count = count_stopping_rules(tree, anchor, budget.max_assignments);
    if (count > budget.max_assignments) throw BudgetExceeded(count, budget.max_assignments);

    // Stop sets as node lists: {anchor} itself, or a cross product of child
    // rules when deferring.
    auto build = [&](auto&& self, int id) -> std::vector<std::vector<int>> {
        std::vector<std::vector<int>> out;
        out.push_back({id});
        if (tree.is_leaf(id)) return out;
        std::vector<std::vector<int>> partial{{}};
        for (int c : tree.children(id)) {
            auto child_sets = self(self, c);
            std::vector<std::vector<int>> next;
            for (const auto& left : partial) {
                for (const auto& right : child_sets) {
                    auto combined = left;
                    combined.insert(combined.end(), right.begin(), right.end());
                    next.push_back(std::move(combined));
                }
            }
            partial = std::move(next);
        }
        out.insert(out.end(), partial.begin(), partial.end());
        return out;
    };

    std::vector<StoppingRule> rules;
    for (const auto& stop_set : build(build, anchor)) {
        StoppingRule rule;
        rule.anchor = anchor;
        rule.stop.assign(static_cast<size_t>(tree.num_nodes()), 0);
        for (int id : stop_set) rule.stop[static_cast<size_t>(id)] = 1;
        rules.push_back(std::move(rule));
    }
    return rules;
}

double enumerate_stopping_optimum(const ProcessField& u, int anchor,
                                  const EnumerationBudget& budget) {
    if (!u.tree) throw std::invalid_argument("gain process has no tree");
    double best = -std::numeric_limits<double>::infinity();
    for (const StoppingRule& rule : enumerate_stopping_rules(*u.tree, anchor, budget))
        best = std::max(best, stopped_expectation(u, rule));
    return best;
}

bool mixed_mode_snell_check(const ValueField& vf, const StoppingRule& tau,
                            const std::vector<int>& iota) {
    const ScenarioTree& tree = *vf.model.tree;
    const int m = vf.model.num_modes;
    auto violations = validate_stopping_rule(tree, tau);
    if (!violations.empty())
        throw std::invalid_argument("invalid stopping rule: " + violations.front());
    if (iota.size() != static_cast<size_t>(tree.num_nodes()))
        throw std::invalid_argument("mode selector covers " + std::to_string(iota.size()) +
                                    " nodes, tree has " + std::to_string(tree.num_nodes()));

    // Stop nodes of the rule: first flagged node on each path below the anchor.
    std::vector<int> stops;
    std::vector<int> stack{tau.anchor};
    while (!stack.empty()) {
        int id = stack.back();
        stack.pop_back();
        if (tau.stops_at(id)) {
            stops.push_back(id);
            continue;
        }
        for (int c : tree.children(id)) stack.push_back(c);
    }

    // Below each stop node the selected mode is frozen, so the mixed field
    // must agree there with that mode's envelope identity.
    std::vector<ProcessField> envelope(static_cast<size_t>(m));
    std::vector<bool> have(static_cast<size_t>(m), false);
    for (int stop : stops) {
        int j = iota[static_cast<size_t>(stop)];
        if (j < 0 || j >= m)
            throw std::invalid_argument("mode selector out of range at node " +
                                        std::to_string(stop));
        if (!have[static_cast<size_t>(j)]) {
            envelope[static_cast<size_t>(j)] = snell_envelope(vf.u_hat_field(j));
            have[static_cast<size_t>(j)] = true;
        }
        for (int id : tree.subtree(stop))
            if (std::abs(envelope[static_cast<size_t>(j)].at(id) - vf.y_hat_at(id, j)) > kValueTol)
                return false;
    }
    return true;
}

}  // namespace oswitch
