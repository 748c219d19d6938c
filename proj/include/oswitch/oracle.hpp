#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "oswitch/snell.hpp"
#include "oswitch/solver.hpp"
#include "oswitch/strategy.hpp"

namespace oswitch {

/// Caps on brute-force enumeration. The assignment cap is the hard limit on
/// how many candidate controls (or stopping rules) may be enumerated; the
/// structural limits keep oracle instances at desk scale.
struct EnumerationBudget {
    long long max_assignments = 10'000'000;
    int max_horizon = 4;
    int max_modes = 3;
    int max_branching = 3;
};

/// Thrown when an instance would need more enumeration than the budget allows.
class BudgetExceeded : public std::runtime_error {
  public:
    BudgetExceeded(long long required, long long cap)
        : std::runtime_error("enumeration budget exceeded: needs " + std::to_string(required) +
                             ", budget " + std::to_string(cap)),
          required_(required) {}
    long long required() const { return required_; }

  private:
    long long required_;
};

struct OracleResult {
    double value = 0.0;
    Strategy argmax;
};

/// Ground truth by exhaustive search: tries every per-node mode assignment on
/// the start node's subtree (these are exactly the canonical admissible
/// controls) and returns the best payoff with its earliest lexicographic
/// argmax. Deliberately free of pruning so it shares no reasoning with the
/// solver it certifies.
OracleResult enumerate_optimum(const SwitchingModel& model, int start_node, int start_mode,
                               const EnumerationBudget& budget = {});

/// All adapted stopping rules below the anchor (every way to cut each path
/// exactly once). Throws BudgetExceeded when their number tops the cap.
std::vector<StoppingRule> enumerate_stopping_rules(const ScenarioTree& tree, int anchor,
                                                   const EnumerationBudget& budget = {});

/// Best expected stopped value over every enumerated rule; the Snell envelope
/// at the anchor must match it.
double enumerate_stopping_optimum(const ProcessField& u, int anchor,
                                  const EnumerationBudget& budget = {});

/// Spot check of the solved system on the region at-and-after a stopping rule:
/// below each stop node, with j the mode chosen there, y_hat(., j) must be the
/// Snell envelope of u_hat(., j). Mixing modes across stop nodes exercises the
/// measurable-selection step of the optimality argument.
bool mixed_mode_snell_check(const ValueField& vf, const StoppingRule& tau,
                            const std::vector<int>& iota);

}  // namespace oswitch
