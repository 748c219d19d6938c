#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "oswitch/model.hpp"
#include "oswitch/tree.hpp"

namespace oswitch {

/// Recipe for a random valid instance. branching[t] is the number of children
/// of every time-t node, so a chain is all ones. Ranges are inclusive; the
/// cost range may dip negative to produce switching subsidies. Generation is a
/// pure function of the seed.
struct GeneratorSpec {
    int horizon = 2;
    std::vector<int> branching;  // one entry per time step 0..horizon-1
    int num_modes = 2;
    std::pair<double, double> psi_range{-1.0, 1.0};
    std::pair<double, double> terminal_range{-1.0, 1.0};
    std::pair<double, double> gamma_range{-0.4, 1.5};
    std::uint64_t seed = 0;
};

/// Deterministic chain: one node per time, branch probability 1.
TreePtr make_chain(int horizon);

/// Tree with the given per-level branching and equal branch probabilities
/// (e.g. {2, 2} is the symmetric two-period binomial).
TreePtr make_uniform_tree(int horizon, const std::vector<int>& branching);

/// Random valid instance: tree with random (positive, renormalized) branch
/// probabilities, rewards drawn uniformly from their ranges, and switching
/// costs rejection-sampled until the zero-diagonal and strict triangle
/// conditions hold at every node. Throws std::invalid_argument when the spec
/// is malformed or when 10^4 rejection rounds at some node fail to satisfy
/// the triangle constraints (a sign the cost range is infeasible).
SwitchingModel gen_instance(const GeneratorSpec& spec);

}  // namespace oswitch
