#pragma once

#include <string>
#include <vector>

#include "oswitch/tree.hpp"

namespace oswitch {

/// Problem data for an optimal switching instance on a scenario tree.
///
/// Modes are indexed 0..num_modes-1. Arrays are flattened per node:
///   psi[node*m + i]              running reward for holding mode i at the node
///   gamma[(node*m + i)*m + j]    cost of switching i -> j at the node (signed)
///   terminal[node*m + i]         terminal reward at a leaf
///
/// psi rows at horizon-time nodes and terminal rows at inner nodes are stored
/// for shape uniformity but never read. Switching costs must have a zero
/// diagonal and satisfy the strict triangle inequality
///   gamma[i][k] < gamma[i][j] + gamma[j][k]   (i != j, j != k)
/// at every node; negative off-diagonal entries (switching subsidies) are
/// allowed as long as no profitable switching cycle exists, which the triangle
/// condition rules out. Immutable by convention once built.
struct SwitchingModel {
    TreePtr tree;
    int num_modes = 0;
    std::vector<double> psi;
    std::vector<double> gamma;
    std::vector<double> terminal;

    double psi_at(int node, int mode) const {
        return psi[static_cast<size_t>(node) * num_modes + mode];
    }
    double gamma_at(int node, int from, int to) const {
        return gamma[(static_cast<size_t>(node) * num_modes + from) * num_modes + to];
    }
    double terminal_at(int node, int mode) const {
        return terminal[static_cast<size_t>(node) * num_modes + mode];
    }
};

/// Builds a model and throws std::invalid_argument on shape errors (null tree,
/// m < 2, wrong array sizes). Semantic checks live in validate_model.
SwitchingModel make_model(TreePtr tree, int num_modes, std::vector<double> psi,
                          std::vector<double> gamma, std::vector<double> terminal);

/// Checks the cost assumptions at every node: zero diagonal, strict triangle
/// inequality (with margin kStrictTriangleEps), finite entries, and array
/// shapes. Returns one message per violation naming node and mode indices.
std::vector<std::string> validate_model(const SwitchingModel& model);

/// A finite switching cost so large that paying it can never be optimal:
///   2 * (max|terminal| + T*max|psi| + T*max|gamma|) + 1.
/// Used by generators to emulate forbidden transitions while keeping the
/// triangle arithmetic well-defined (no infinities).
double forbid_switch_cost(const SwitchingModel& model);

/// Flips the sign of every reward and cost, turning a minimization problem
/// into this library's maximization form: min J = -max(-J). When the input
/// passes validate_model, the negated costs are re-validated and a failure
/// throws std::invalid_argument listing the violations rather than silently
/// producing an unusable model. (Negation flips the sign of every round-trip
/// sum gamma[i][j] + gamma[j][i], so negating a cost matrix that is valid in
/// maximization form always fails: minimization instances must be built with
/// costs that are valid after negation.) Invalid input passes through
/// unchecked.
SwitchingModel negate_for_minimization(const SwitchingModel& model);

}  // namespace oswitch
