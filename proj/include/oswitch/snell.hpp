#pragma once

#include <vector>

#include "oswitch/tree.hpp"

namespace oswitch {

/// An adapted real-valued process on a scenario tree: one value per node.
struct ProcessField {
    TreePtr tree;
    std::vector<double> values;  // indexed by node id

    double at(int node) const { return values[static_cast<size_t>(node)]; }
};

/// Smallest supermartingale dominating u, by backward recursion:
///   Z(leaf) = U(leaf),  Z(node) = max(U(node), E[Z | children]).
/// Throws std::invalid_argument on shape mismatch.
ProcessField snell_envelope(const ProcessField& u);

/// First hitting rule of Z = U at-or-after the anchor: on each path below
/// anchor, stop at the first node where |Z - U| <= kHittingEqTol. Always total
/// because Z = U at every leaf. Ties stop immediately (first hitting).
/// Z must be the Snell envelope of u for the rule to be an optimal stopping
/// time; the function itself only needs matching shapes.
StoppingRule optimal_stopping_time(const ProcessField& u, const ProcessField& z, int anchor);

/// E[U at the stop node | anchor of the rule]: folds u over the subtree below
/// rule.anchor, cutting at stopped nodes.
double stopped_expectation(const ProcessField& u, const StoppingRule& rule);

/// True iff Z behaves as a martingale strictly before the first hitting rule:
/// |Z(node) - E[Z | children]| <= kValueTol at every node on a path segment
/// from anchor up to (excluding) the stop node.
bool check_stopped_martingale(const ProcessField& u, const ProcessField& z, int anchor);

}  // namespace oswitch
