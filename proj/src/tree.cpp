#include "oswitch/tree.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "oswitch/tolerances.hpp"

namespace oswitch {

namespace {

std::string node_tag(int id) { return "node " + std::to_string(id); }

}  // namespace

ScenarioTree::ScenarioTree(int horizon, std::vector<Node> nodes)
    : horizon_(horizon), nodes_(std::move(nodes)) {
    if (horizon_ < 0) throw std::invalid_argument("horizon must be non-negative");
    if (nodes_.empty()) throw std::invalid_argument("tree has no nodes");

    const int n = static_cast<int>(nodes_.size());
    for (int i = 0; i < n; ++i) {
        const Node& nd = nodes_[static_cast<size_t>(i)];
        if (nd.id != i)
            throw std::invalid_argument(node_tag(i) + ": ids must be dense and in order, got " +
                                        std::to_string(nd.id));
        if (nd.parent && (*nd.parent < 0 || *nd.parent >= n))
            throw std::invalid_argument(node_tag(i) + ": parent " + std::to_string(*nd.parent) +
                                        " out of range");
        if (nd.parent && *nd.parent == i)
            throw std::invalid_argument(node_tag(i) + ": node is its own parent");
    }

    // A parent chain longer than the node count means the links loop.
    for (int i = 0; i < n; ++i) {
        int steps = 0;
        std::optional<int> cur = nodes_[static_cast<size_t>(i)].parent;
        while (cur) {
            if (++steps > n)
                throw std::invalid_argument(node_tag(i) + ": parent links form a cycle");
            cur = nodes_[static_cast<size_t>(*cur)].parent;
        }
    }

    children_.assign(static_cast<size_t>(n), {});
    int max_t = 0;
    for (const Node& nd : nodes_) {
        if (nd.parent)
            children_[static_cast<size_t>(*nd.parent)].push_back(nd.id);
        else
            roots_.push_back(nd.id);
        if (nd.time > max_t) max_t = nd.time;
    }
    if (roots_.empty()) throw std::invalid_argument("tree has no root");

    by_time_.assign(static_cast<size_t>(std::max(max_t, 0)) + 1, {});
    for (const Node& nd : nodes_) {
        if (nd.time >= 0) by_time_[static_cast<size_t>(nd.time)].push_back(nd.id);
    }
    for (int i = 0; i < n; ++i) {
        if (children_[static_cast<size_t>(i)].empty()) leaves_.push_back(i);
    }
}

const std::vector<int>& ScenarioTree::nodes_at_time(int t) const {
    static const std::vector<int> empty;
    if (t < 0 || t >= static_cast<int>(by_time_.size())) return empty;
    return by_time_[static_cast<size_t>(t)];
}

std::vector<int> ScenarioTree::subtree(int id) const {
    std::vector<int> out;
    std::vector<int> stack{id};
    while (!stack.empty()) {
        int cur = stack.back();
        stack.pop_back();
        out.push_back(cur);
        const auto& kids = children(cur);
        // Push in reverse so the preorder visits children in id order.
        for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(*it);
    }
    return out;
}

std::vector<int> ScenarioTree::leaves_below(int id) const {
    std::vector<int> out;
    for (int nd : subtree(id))
        if (is_leaf(nd)) out.push_back(nd);
    return out;
}

std::vector<int> ScenarioTree::path_from_root(int id) const {
    std::vector<int> rev;
    std::optional<int> cur = id;
    while (cur) {
        rev.push_back(*cur);
        cur = node(*cur).parent;
    }
    return {rev.rbegin(), rev.rend()};
}

double ScenarioTree::node_measure(int id) const {
    double p = 1.0;
    for (int nd : path_from_root(id)) p *= node(nd).branch_prob;
    return p;
}

std::vector<std::string> validate_tree(const ScenarioTree& tree) {
    std::vector<std::string> out;

    const auto& roots = tree.parentless_nodes();
    if (roots.size() != 1)
        out.push_back("expected exactly one root, found " + std::to_string(roots.size()));
    for (int r : roots) {
        if (tree.node(r).time != 0)
            out.push_back(node_tag(r) + ": root must sit at time 0, has time " +
                          std::to_string(tree.node(r).time));
    }

    for (const Node& nd : tree.nodes()) {
        if (nd.time < 0 || nd.time > tree.horizon())
            out.push_back(node_tag(nd.id) + ": time " + std::to_string(nd.time) +
                          " outside 0.." + std::to_string(tree.horizon()));
        if (nd.parent) {
            int pt = tree.node(*nd.parent).time;
            if (nd.time != pt + 1)
                out.push_back(node_tag(nd.id) + ": time " + std::to_string(nd.time) +
                              " is not parent time " + std::to_string(pt) + " plus one");
        }
        if (!(nd.branch_prob > 0.0) || !std::isfinite(nd.branch_prob))
            out.push_back(node_tag(nd.id) + ": branch probability must be positive and finite, got " +
                          std::to_string(nd.branch_prob));
        if (nd.branch_prob > 1.0 + kProbSumTol)
            out.push_back(node_tag(nd.id) + ": branch probability exceeds 1");
    }

    for (const Node& nd : tree.nodes()) {
        const auto& kids = tree.children(nd.id);
        if (kids.empty()) {
            if (nd.time != tree.horizon())
                out.push_back(node_tag(nd.id) + ": leaf at time " + std::to_string(nd.time) +
                              ", expected leaves only at the horizon " +
                              std::to_string(tree.horizon()));
            continue;
        }
        double mass = 0.0;
        for (int c : kids) mass += tree.node(c).branch_prob;
        if (std::abs(mass - 1.0) > kProbSumTol)
            out.push_back(node_tag(nd.id) + ": child probabilities sum to " +
                          std::to_string(mass) + ", expected 1");
    }

    return out;
}

std::vector<std::string> validate_stopping_rule(const ScenarioTree& tree,
                                                const StoppingRule& rule) {
    std::vector<std::string> out;
    if (rule.anchor < 0 || rule.anchor >= tree.num_nodes()) {
        out.push_back("anchor " + std::to_string(rule.anchor) + " out of range");
        return out;
    }
    if (rule.stop.size() != static_cast<size_t>(tree.num_nodes())) {
        out.push_back("stop flags cover " + std::to_string(rule.stop.size()) + " nodes, tree has " +
                      std::to_string(tree.num_nodes()));
        return out;
    }
    for (int leaf : tree.leaves_below(rule.anchor)) {
        int count = 0;
        bool reached_anchor = false;
        for (int nd : tree.path_from_root(leaf)) {
            if (nd == rule.anchor) reached_anchor = true;
            if (reached_anchor && rule.stops_at(nd)) ++count;
        }
        if (count != 1)
            out.push_back("path to leaf " + std::to_string(leaf) + " stops " +
                          std::to_string(count) + " times, expected exactly once");
    }
    return out;
}

double conditional_expectation(const ScenarioTree& tree, std::span<const double> values,
                               int node) {
    if (node < 0 || node >= tree.num_nodes())
        throw std::invalid_argument("node " + std::to_string(node) + " out of range");
    if (values.size() != static_cast<size_t>(tree.num_nodes()))
        throw std::invalid_argument("value vector covers " + std::to_string(values.size()) +
                                    " nodes, tree has " + std::to_string(tree.num_nodes()));
    const auto& kids = tree.children(node);
    if (kids.empty())
        throw std::invalid_argument(node_tag(node) + ": no children to condition on");
    double acc = 0.0;
    for (int c : kids) acc += tree.node(c).branch_prob * values[static_cast<size_t>(c)];
    return acc;
}

double path_measure(const ScenarioTree& tree, int leaf) {
    if (leaf < 0 || leaf >= tree.num_nodes())
        throw std::invalid_argument("node " + std::to_string(leaf) + " out of range");
    if (!tree.is_leaf(leaf))
        throw std::invalid_argument(node_tag(leaf) + " is not a leaf");
    return tree.node_measure(leaf);
}

}  // namespace oswitch
