#include "oswitch/snell.hpp"

#include <cmath>
#include <stdexcept>

#include "oswitch/tolerances.hpp"

namespace oswitch {

namespace {

void require_field(const ProcessField& f, const char* what) {
    if (!f.tree) throw std::invalid_argument(std::string(what) + " has no tree");
    if (f.values.size() != static_cast<size_t>(f.tree->num_nodes()))
        throw std::invalid_argument(std::string(what) + " covers " +
                                    std::to_string(f.values.size()) + " nodes, tree has " +
                                    std::to_string(f.tree->num_nodes()));
}

void require_pair(const ProcessField& u, const ProcessField& z, int anchor) {
    require_field(u, "gain process");
    require_field(z, "envelope");
    if (u.tree.get() != z.tree.get())
        throw std::invalid_argument("gain process and envelope live on different trees");
    if (anchor < 0 || anchor >= u.tree->num_nodes())
        throw std::invalid_argument("anchor " + std::to_string(anchor) + " out of range");
}

}  // namespace

ProcessField snell_envelope(const ProcessField& u) {
    require_field(u, "gain process");
    const ScenarioTree& tree = *u.tree;
    ProcessField z{u.tree, u.values};
    // Nodes are processed deepest time first so children are already final.
    for (int t = tree.max_time(); t >= 0; --t) {
        for (int id : tree.nodes_at_time(t)) {
            if (tree.is_leaf(id)) continue;
            double cont = conditional_expectation(tree, z.values, id);
            z.values[static_cast<size_t>(id)] = std::max(u.at(id), cont);
        }
    }
    return z;
}

StoppingRule optimal_stopping_time(const ProcessField& u, const ProcessField& z, int anchor) {
    require_pair(u, z, anchor);
    const ScenarioTree& tree = *u.tree;
    StoppingRule rule;
    rule.anchor = anchor;
    rule.stop.assign(static_cast<size_t>(tree.num_nodes()), 0);
    std::vector<int> stack{anchor};
    while (!stack.empty()) {
        int id = stack.back();
        stack.pop_back();
        if (std::abs(z.at(id) - u.at(id)) <= kHittingEqTol || tree.is_leaf(id)) {
            rule.stop[static_cast<size_t>(id)] = 1;
            continue;  // first hit: do not descend further on this path
        }
        for (int c : tree.children(id)) stack.push_back(c);
    }
    return rule;
}

double stopped_expectation(const ProcessField& u, const StoppingRule& rule) {
    require_field(u, "gain process");
    const ScenarioTree& tree = *u.tree;
    auto violations = validate_stopping_rule(tree, rule);
    if (!violations.empty())
        throw std::invalid_argument("invalid stopping rule: " + violations.front());

    // E[U_tau | anchor] = fold over the subtree, cutting at stopped nodes.
    auto fold = [&](auto&& self, int id) -> double {
        if (rule.stops_at(id)) return u.at(id);
        double acc = 0.0;
        for (int c : tree.children(id)) acc += tree.node(c).branch_prob * self(self, c);
        return acc;
    };
    return fold(fold, rule.anchor);
}

bool check_stopped_martingale(const ProcessField& u, const ProcessField& z, int anchor) {
    require_pair(u, z, anchor);
    const ScenarioTree& tree = *u.tree;
    StoppingRule rule = optimal_stopping_time(u, z, anchor);
    // Walk the pre-stop region; every node there must satisfy the martingale
    // equality one step ahead.
    std::vector<int> stack{anchor};
    while (!stack.empty()) {
        int id = stack.back();
        stack.pop_back();
        if (rule.stops_at(id)) continue;
        double cont = conditional_expectation(tree, z.values, id);
        if (std::abs(z.at(id) - cont) > kValueTol) return false;
        for (int c : tree.children(id)) stack.push_back(c);
    }
    return true;
}

}  // namespace oswitch
