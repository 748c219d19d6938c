#include "oswitch/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace oswitch {

// ordered_json keeps keys in insertion order, so written documents are stable
// and diff cleanly.
using json = nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(const std::string& what) { throw ParseError(what); }

const json& field(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) fail(std::string("missing field \"") + key + "\"");
    return *it;
}

int int_field(const json& obj, const char* key) {
    const json& v = field(obj, key);
    if (!v.is_number_integer()) fail(std::string("field \"") + key + "\" must be an integer");
    return v.get<int>();
}

double number_field(const json& obj, const char* key) {
    const json& v = field(obj, key);
    if (!v.is_number()) fail(std::string("field \"") + key + "\" must be a number");
    return v.get<double>();
}

json parse_stream(std::istream& in) {
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        fail(std::string("not valid JSON: ") + e.what());
    }
}

Anchor read_anchor(const json& obj) {
    if (!obj.is_object()) fail("anchor must be an object");
    return Anchor{int_field(obj, "node"), int_field(obj, "mode")};
}

json anchor_json(const Anchor& a) { return json{{"node", a.node}, {"mode", a.mode}}; }

json switches_json(const std::vector<SwitchEvent>& events) {
    json arr = json::array();
    for (const auto& ev : events)
        arr.push_back(json{{"node", ev.node}, {"from", ev.from_mode}, {"to", ev.to_mode}});
    return arr;
}

std::vector<double> read_row(const json& row, size_t expected, const std::string& what) {
    if (!row.is_array() || row.size() != expected)
        fail(what + " must be an array of " + std::to_string(expected) + " numbers");
    std::vector<double> out;
    out.reserve(expected);
    for (const auto& v : row) {
        if (!v.is_number()) fail(what + " must contain only numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

}  // namespace

Instance read_instance(std::istream& in) {
    json doc = parse_stream(in);
    if (!doc.is_object()) fail("instance document must be a JSON object");

    const json& tree_sec = field(doc, "tree");
    int horizon = int_field(tree_sec, "horizon");
    const json& node_arr = field(tree_sec, "nodes");
    if (!node_arr.is_array() || node_arr.empty()) fail("tree.nodes must be a non-empty array");

    std::vector<Node> nodes;
    nodes.reserve(node_arr.size());
    for (const auto& nj : node_arr) {
        if (!nj.is_object()) fail("tree.nodes entries must be objects");
        Node nd;
        nd.id = int_field(nj, "id");
        nd.time = int_field(nj, "time");
        const json& parent = field(nj, "parent");
        if (parent.is_null())
            nd.parent.reset();
        else if (parent.is_number_integer())
            nd.parent = parent.get<int>();
        else
            fail("node parent must be an integer or null");
        nd.branch_prob = number_field(nj, "prob");
        nodes.push_back(nd);
    }

    TreePtr tree;
    try {
        tree = std::make_shared<ScenarioTree>(horizon, std::move(nodes));
    } catch (const std::invalid_argument& e) {
        fail(std::string("tree section is malformed: ") + e.what());
    }

    const json& model_sec = field(doc, "model");
    int m = int_field(model_sec, "num_modes");
    if (m < 1) fail("num_modes must be positive");
    const size_t n = static_cast<size_t>(tree->num_nodes());

    const json& psi_arr = field(model_sec, "psi");
    if (!psi_arr.is_array() || psi_arr.size() != n)
        fail("model.psi must have one row per node (" + std::to_string(n) + ")");
    std::vector<double> psi;
    psi.reserve(n * m);
    for (size_t id = 0; id < n; ++id) {
        auto row = read_row(psi_arr[id], static_cast<size_t>(m),
                            "model.psi row " + std::to_string(id));
        psi.insert(psi.end(), row.begin(), row.end());
    }

    const json& gamma_arr = field(model_sec, "gamma");
    if (!gamma_arr.is_array() || gamma_arr.size() != n)
        fail("model.gamma must have one matrix per node (" + std::to_string(n) + ")");
    std::vector<double> gamma;
    gamma.reserve(n * m * m);
    for (size_t id = 0; id < n; ++id) {
        const json& mat = gamma_arr[id];
        if (!mat.is_array() || mat.size() != static_cast<size_t>(m))
            fail("model.gamma matrix " + std::to_string(id) + " must have " + std::to_string(m) +
                 " rows");
        for (size_t i = 0; i < static_cast<size_t>(m); ++i) {
            auto row = read_row(mat[i], static_cast<size_t>(m),
                                "model.gamma matrix " + std::to_string(id) + " row " +
                                    std::to_string(i));
            gamma.insert(gamma.end(), row.begin(), row.end());
        }
    }

    const json& term_obj = field(model_sec, "terminal");
    if (!term_obj.is_object()) fail("model.terminal must map leaf ids to mode rows");
    std::vector<double> terminal(n * static_cast<size_t>(m), 0.0);
    for (const auto& [key, row] : term_obj.items()) {
        int id;
        try {
            size_t pos = 0;
            id = std::stoi(key, &pos);
            if (pos != key.size()) throw std::invalid_argument(key);
        } catch (const std::exception&) {
            fail("model.terminal key \"" + key + "\" is not a node id");
        }
        if (id < 0 || id >= tree->num_nodes())
            fail("model.terminal names node " + std::to_string(id) + ", tree has " +
                 std::to_string(n) + " nodes");
        if (!tree->is_leaf(id))
            fail("model.terminal names node " + std::to_string(id) + ", which is not a leaf");
        auto vals = read_row(row, static_cast<size_t>(m), "model.terminal[" + key + "]");
        for (size_t i = 0; i < vals.size(); ++i)
            terminal[static_cast<size_t>(id) * m + i] = vals[i];
    }

    Instance inst{SwitchingModel{}, std::nullopt};
    try {
        inst.model = make_model(std::move(tree), m, std::move(psi), std::move(gamma),
                                std::move(terminal));
    } catch (const std::invalid_argument& e) {
        fail(std::string("model section is malformed: ") + e.what());
    }

    if (auto it = doc.find("anchor"); it != doc.end() && !it->is_null())
        inst.anchor = read_anchor(*it);
    return inst;
}

Instance read_instance_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open " + path);
    return read_instance(in);
}

std::string write_instance(const Instance& instance) {
    const SwitchingModel& model = instance.model;
    const ScenarioTree& tree = *model.tree;
    const int m = model.num_modes;

    json node_arr = json::array();
    for (const Node& nd : tree.nodes()) {
        json nj{{"id", nd.id}, {"time", nd.time}};
        if (nd.parent)
            nj["parent"] = *nd.parent;
        else
            nj["parent"] = nullptr;
        nj["prob"] = nd.branch_prob;
        node_arr.push_back(std::move(nj));
    }

    json psi_arr = json::array();
    json gamma_arr = json::array();
    for (int id = 0; id < tree.num_nodes(); ++id) {
        json row = json::array();
        for (int i = 0; i < m; ++i) row.push_back(model.psi_at(id, i));
        psi_arr.push_back(std::move(row));
        json mat = json::array();
        for (int i = 0; i < m; ++i) {
            json grow = json::array();
            for (int j = 0; j < m; ++j) grow.push_back(model.gamma_at(id, i, j));
            mat.push_back(std::move(grow));
        }
        gamma_arr.push_back(std::move(mat));
    }

    json term_obj = json::object();
    for (int leaf : tree.leaves()) {
        json row = json::array();
        for (int i = 0; i < m; ++i) row.push_back(model.terminal_at(leaf, i));
        term_obj[std::to_string(leaf)] = std::move(row);
    }

    json doc;
    doc["tree"] = json{{"horizon", tree.horizon()}, {"nodes", std::move(node_arr)}};
    doc["model"] = json{{"num_modes", m},
                        {"psi", std::move(psi_arr)},
                        {"gamma", std::move(gamma_arr)},
                        {"terminal", std::move(term_obj)}};
    if (instance.anchor) doc["anchor"] = anchor_json(*instance.anchor);
    return doc.dump(2) + "\n";
}

StrategyDocument read_strategy(std::istream& in) {
    json doc = parse_stream(in);
    if (!doc.is_object()) fail("strategy document must be a JSON object");
    StrategyDocument out;
    out.start = read_anchor(field(doc, "start"));
    const json& arr = field(doc, "switches");
    if (!arr.is_array()) fail("switches must be an array");
    for (const auto& ej : arr) {
        if (!ej.is_object()) fail("switches entries must be objects");
        out.switches.push_back(
            SwitchEvent{int_field(ej, "node"), int_field(ej, "from"), int_field(ej, "to")});
    }
    return out;
}

StrategyDocument read_strategy_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open " + path);
    return read_strategy(in);
}

std::string write_strategy(const StrategyDocument& doc) {
    json j;
    j["start"] = anchor_json(doc.start);
    j["switches"] = switches_json(doc.switches);
    return j.dump(2) + "\n";
}

std::string write_solve_result(const SolveResult& result) {
    json doc;
    doc["variant"] = result.variant;
    if (result.values) {
        const ValueField& vf = *result.values;
        const int m = vf.model.num_modes;
        json y_arr = json::array();
        for (int id = 0; id < vf.model.tree->num_nodes(); ++id) {
            json row = json::array();
            for (int i = 0; i < m; ++i) row.push_back(vf.y_at(id, i));
            y_arr.push_back(std::move(row));
        }
        doc["y"] = std::move(y_arr);
    }
    if (result.anchor) doc["anchor"] = anchor_json(*result.anchor);
    if (result.switches) doc["strategy"] = json{{"switches", switches_json(*result.switches)}};
    if (result.value) doc["value"] = *result.value;
    if (result.report)
        doc["report"] = json{{"explicit_vs_implicit", result.report->explicit_vs_implicit},
                             {"snell_identity", result.report->snell_identity},
                             {"verification", result.report->verification}};
    return doc.dump(2) + "\n";
}

std::string write_value(double value) { return json(value).dump(); }

std::string write_oracle_report(const Anchor& anchor, double oracle_value, double dp_value,
                                double abs_difference) {
    json doc;
    doc["anchor"] = anchor_json(anchor);
    doc["oracle_value"] = oracle_value;
    doc["dp_value"] = dp_value;
    doc["abs_difference"] = abs_difference;
    return doc.dump(2) + "\n";
}

void write_file_atomic(const std::string& path, const std::string& text) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp);
        out << text;
        out.flush();
        if (!out) throw std::runtime_error("failed writing " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw std::runtime_error("cannot move " + tmp + " into place");
    }
}

}  // namespace oswitch
