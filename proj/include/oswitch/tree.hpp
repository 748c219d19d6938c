#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace oswitch {

/// One node of a scenario tree. The node at time t stands for an atom of the
/// time-t information set; branch_prob is the probability of reaching it from
/// its parent (1 for the root).
struct Node {
    int id = 0;
    int time = 0;
    std::optional<int> parent;  // empty for the root
    double branch_prob = 1.0;
};

/// A rooted scenario tree over integer times 0..horizon. Time-t nodes are the
/// atoms of the time-t sigma-algebra, so an adapted process is simply one real
/// per node and a conditional expectation is a one-step weighted sum over
/// children.
///
/// The constructor only enforces what is needed to navigate safely: dense ids
/// (node(i).id == i), parent references in range, and acyclic parent links.
/// Everything semantic (single root at time 0, unit time steps, leaves at the
/// horizon, probability mass) is reported by validate_tree so that broken
/// inputs can be diagnosed instead of rejected wholesale.
///
/// Immutable after construction; safe to share across concurrent readers.
class ScenarioTree {
  public:
    ScenarioTree(int horizon, std::vector<Node> nodes);

    int horizon() const { return horizon_; }
    int num_nodes() const { return static_cast<int>(nodes_.size()); }
    const Node& node(int id) const { return nodes_[static_cast<size_t>(id)]; }
    const std::vector<Node>& nodes() const { return nodes_; }

    /// Id of the first parentless node (the root when the tree is valid).
    int root() const { return roots_.front(); }
    const std::vector<int>& parentless_nodes() const { return roots_; }

    const std::vector<int>& children(int id) const { return children_[static_cast<size_t>(id)]; }
    bool is_leaf(int id) const { return children(id).empty(); }

    /// All node ids with the given time stamp (empty vector past the deepest).
    const std::vector<int>& nodes_at_time(int t) const;
    /// Childless nodes, in id order.
    const std::vector<int>& leaves() const { return leaves_; }
    int max_time() const { return static_cast<int>(by_time_.size()) - 1; }

    /// Preorder listing of the subtree rooted at id (id first).
    std::vector<int> subtree(int id) const;
    std::vector<int> leaves_below(int id) const;
    /// Node ids on the root-to-id path, root first, id last.
    std::vector<int> path_from_root(int id) const;

    /// Probability of reaching id from the root: product of branch
    /// probabilities along the path.
    double node_measure(int id) const;

  private:
    int horizon_;
    std::vector<Node> nodes_;
    std::vector<std::vector<int>> children_;
    std::vector<std::vector<int>> by_time_;
    std::vector<int> roots_;
    std::vector<int> leaves_;
};

/// An adapted stopping time anchored at a node: per-node stop flags on the
/// subtree under `anchor`, with exactly one flagged node on each path from the
/// anchor to a leaf. Flags outside that subtree are meaningless.
struct StoppingRule {
    int anchor = 0;
    std::vector<std::uint8_t> stop;  // indexed by node id

    bool stops_at(int id) const { return stop[static_cast<size_t>(id)] != 0; }
};

/// Checks every tree invariant and returns one message per violation
/// (empty means valid). Messages name the offending node and rule.
std::vector<std::string> validate_tree(const ScenarioTree& tree);

/// Checks the one-stop-per-path property of a stopping rule below its anchor.
std::vector<std::string> validate_stopping_rule(const ScenarioTree& tree, const StoppingRule& rule);

/// One-step conditional expectation at a non-leaf node:
/// sum over children of branch_prob(child) * values[child].
/// Throws std::invalid_argument on a leaf (no children to condition on).
double conditional_expectation(const ScenarioTree& tree, std::span<const double> values, int node);

/// Probability of the path ending at `leaf` (product of branch probabilities
/// from the root). Throws std::invalid_argument if the node is not a leaf.
double path_measure(const ScenarioTree& tree, int leaf);

using TreePtr = std::shared_ptr<const ScenarioTree>;

}  // namespace oswitch
