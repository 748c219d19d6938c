#include "oswitch/model.hpp"

#include <cmath>
#include <stdexcept>

#include "oswitch/tolerances.hpp"

namespace oswitch {

SwitchingModel make_model(TreePtr tree, int num_modes, std::vector<double> psi,
                          std::vector<double> gamma, std::vector<double> terminal) {
    if (!tree) throw std::invalid_argument("model needs a tree");
    if (num_modes < 2)
        throw std::invalid_argument("need at least 2 modes, got " + std::to_string(num_modes));
    const size_t n = static_cast<size_t>(tree->num_nodes());
    const size_t m = static_cast<size_t>(num_modes);
    if (psi.size() != n * m)
        throw std::invalid_argument("psi has " + std::to_string(psi.size()) + " entries, expected " +
                                    std::to_string(n * m));
    if (gamma.size() != n * m * m)
        throw std::invalid_argument("gamma has " + std::to_string(gamma.size()) +
                                    " entries, expected " + std::to_string(n * m * m));
    if (terminal.size() != n * m)
        throw std::invalid_argument("terminal has " + std::to_string(terminal.size()) +
                                    " entries, expected " + std::to_string(n * m));
    return SwitchingModel{std::move(tree), num_modes, std::move(psi), std::move(gamma),
                          std::move(terminal)};
}

std::vector<std::string> validate_model(const SwitchingModel& model) {
    std::vector<std::string> out;
    if (!model.tree) {
        out.push_back("model has no tree");
        return out;
    }
    const int m = model.num_modes;
    if (m < 2) {
        out.push_back("need at least 2 modes, got " + std::to_string(m));
        return out;
    }
    const size_t n = static_cast<size_t>(model.tree->num_nodes());
    if (model.psi.size() != n * m || model.gamma.size() != n * m * m ||
        model.terminal.size() != n * m) {
        out.push_back("array sizes do not match tree (" + std::to_string(n) + " nodes) and mode count " +
                      std::to_string(m));
        return out;
    }

    for (double v : model.psi)
        if (!std::isfinite(v)) {
            out.push_back("psi contains a non-finite entry");
            break;
        }
    for (double v : model.terminal)
        if (!std::isfinite(v)) {
            out.push_back("terminal contains a non-finite entry");
            break;
        }

    for (int node = 0; node < model.tree->num_nodes(); ++node) {
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < m; ++j) {
                double g = model.gamma_at(node, i, j);
                if (!std::isfinite(g)) {
                    out.push_back("node " + std::to_string(node) + ": gamma[" + std::to_string(i) +
                                  "][" + std::to_string(j) + "] is not finite");
                    continue;
                }
                if (i == j && g != 0.0)
                    out.push_back("node " + std::to_string(node) + ": diagonal cost gamma[" +
                                  std::to_string(i) + "][" + std::to_string(i) + "] = " +
                                  std::to_string(g) + ", must be 0");
            }
        }
        // Strict triangle: switching i->k directly must beat i->j->k by more
        // than the fp margin, for every intermediate j. k = i gives
        // gamma[i][j] + gamma[j][i] > 0 (no profitable round trip).
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < m; ++j) {
                if (j == i) continue;
                for (int k = 0; k < m; ++k) {
                    if (k == j) continue;
                    double direct = model.gamma_at(node, i, k);
                    double via = model.gamma_at(node, i, j) + model.gamma_at(node, j, k);
                    if (!(direct < via - kStrictTriangleEps))
                        out.push_back("node " + std::to_string(node) + ": triangle not strict: gamma[" +
                                      std::to_string(i) + "][" + std::to_string(k) + "] = " +
                                      std::to_string(direct) + " !< gamma[" + std::to_string(i) + "][" +
                                      std::to_string(j) + "] + gamma[" + std::to_string(j) + "][" +
                                      std::to_string(k) + "] = " + std::to_string(via));
                }
            }
        }
    }
    return out;
}

double forbid_switch_cost(const SwitchingModel& model) {
    const int m = model.num_modes;
    const int T = model.tree->horizon();
    double max_psi = 0.0, max_gamma = 0.0, max_terminal = 0.0;
    for (const Node& nd : model.tree->nodes()) {
        if (nd.time < T) {
            for (int i = 0; i < m; ++i) {
                max_psi = std::max(max_psi, std::abs(model.psi_at(nd.id, i)));
                for (int j = 0; j < m; ++j)
                    max_gamma = std::max(max_gamma, std::abs(model.gamma_at(nd.id, i, j)));
            }
        }
        if (model.tree->is_leaf(nd.id))
            for (int i = 0; i < m; ++i)
                max_terminal = std::max(max_terminal, std::abs(model.terminal_at(nd.id, i)));
    }
    return 2.0 * (max_terminal + T * max_psi + T * max_gamma) + 1.0;
}

SwitchingModel negate_for_minimization(const SwitchingModel& model) {
    SwitchingModel out = model;
    for (double& v : out.psi) v = -v;
    for (double& v : out.gamma) v = -v;
    for (double& v : out.terminal) v = -v;
    if (validate_model(model).empty()) {
        auto violations = validate_model(out);
        if (!violations.empty()) {
            std::string msg = "negated model violates the cost assumptions:";
            for (const auto& v : violations) msg += "\n  " + v;
            throw std::invalid_argument(msg);
        }
    }
    return out;
}

}  // namespace oswitch
