#pragma once

#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "morseflow/multiflow.hpp"

namespace morseflow {

/// Everything a graph input file can carry:
///   {"states": ["a", ...],
///    "step": {"a": ["a","b"], ...},
///    "neighbors": {"a": ["b"], ...},                       optional
///    "family": {"Xi1": ["a"], ...} or [["a"],["b"]],       optional
///    "eta_family": [{"eta": 0.5, "step": {...}}, ...]}     optional
struct GraphInput {
    MultiflowGraph graph;
    std::optional<InvariantFamily> family;
    std::vector<EtaGraph> eta_graphs; // descending eta, base graph appended as eta = 0
};

namespace detail {

inline std::vector<std::vector<int>> parse_step(const nlohmann::json &j,
                                                const std::vector<std::string> &names) {
    std::map<std::string, int> index;
    for (std::size_t i = 0; i < names.size(); ++i)
        index[names[i]] = static_cast<int>(i);
    std::vector<std::vector<int>> step(names.size());
    for (const auto &name : names) {
        if (!j.contains(name))
            throw std::domain_error("graph json: step relation misses state '" + name + "'");
        for (const auto &succ : j.at(name)) {
            const std::string s = succ.get<std::string>();
            auto it = index.find(s);
            if (it == index.end())
                throw std::domain_error("graph json: unknown successor '" + s + "'");
            step[static_cast<std::size_t>(index[name])].push_back(it->second);
        }
    }
    return step;
}

} // namespace detail

inline GraphInput parse_graph_json(const nlohmann::json &j) {
    GraphInput in;
    if (!j.contains("states") || !j.contains("step"))
        throw std::domain_error("graph json: need 'states' and 'step'");
    std::vector<std::string> names;
    for (const auto &s : j.at("states"))
        names.push_back(s.get<std::string>());

    std::vector<std::vector<int>> nbrs;
    if (j.contains("neighbors")) {
        std::map<std::string, int> index;
        for (std::size_t i = 0; i < names.size(); ++i)
            index[names[i]] = static_cast<int>(i);
        nbrs.assign(names.size(), {});
        for (auto it = j.at("neighbors").begin(); it != j.at("neighbors").end(); ++it) {
            auto from = index.find(it.key());
            if (from == index.end())
                throw std::domain_error("graph json: unknown state in neighbors");
            for (const auto &other : it.value()) {
                auto to = index.find(other.get<std::string>());
                if (to == index.end())
                    throw std::domain_error("graph json: unknown state in neighbors");
                nbrs[static_cast<std::size_t>(from->second)].push_back(to->second);
                nbrs[static_cast<std::size_t>(to->second)].push_back(from->second);
            }
        }
        for (auto &v : nbrs) {
            std::sort(v.begin(), v.end());
            v.erase(std::unique(v.begin(), v.end()), v.end());
        }
    }
    in.graph = MultiflowGraph::from_lists(names, detail::parse_step(j.at("step"), names), nbrs);

    if (j.contains("family")) {
        InvariantFamily fam;
        const auto &jf = j.at("family");
        const auto parse_set = [&](const nlohmann::json &arr) {
            StateSet s;
            for (const auto &name : arr)
                s.push_back(in.graph.index_of(name.get<std::string>()));
            return setops::normalize(std::move(s));
        };
        if (jf.is_array()) {
            int k = 1;
            for (const auto &arr : jf) {
                fam.sets.push_back(parse_set(arr));
                fam.labels.push_back("Xi" + std::to_string(k++));
            }
        } else {
            for (auto it = jf.begin(); it != jf.end(); ++it) { // nlohmann orders keys
                fam.sets.push_back(parse_set(it.value()));
                fam.labels.push_back(it.key());
            }
        }
        in.family = std::move(fam);
    }

    if (j.contains("eta_family")) {
        for (const auto &entry : j.at("eta_family")) {
            EtaGraph eg;
            eg.eta = entry.at("eta").get<double>();
            eg.graph = MultiflowGraph::from_lists(
                names, detail::parse_step(entry.at("step"), names), nbrs);
            in.eta_graphs.push_back(std::move(eg));
        }
        in.eta_graphs.push_back({0.0, in.graph});
    }
    return in;
}

inline GraphInput load_graph_file(const std::string &path) {
    std::ifstream f(path);
    if (!f)
        throw std::domain_error("graph json: cannot open '" + path + "'");
    nlohmann::json j;
    f >> j;
    return parse_graph_json(j);
}

inline nlohmann::json family_to_json(const MultiflowGraph &g, const InvariantFamily &fam) {
    nlohmann::json out = nlohmann::json::array();
    for (std::size_t i = 0; i < fam.sets.size(); ++i) {
        nlohmann::json set = nlohmann::json::array();
        for (int x : fam.sets[i])
            set.push_back(g.state_names[static_cast<std::size_t>(x)]);
        nlohmann::json entry;
        entry["label"] = i < fam.labels.size() ? fam.labels[i] : std::to_string(i);
        entry["states"] = set;
        out.push_back(entry);
    }
    return out;
}

inline nlohmann::json state_set_to_json(const MultiflowGraph &g, const StateSet &s) {
    nlohmann::json out = nlohmann::json::array();
    for (int x : s)
        out.push_back(g.state_names[static_cast<std::size_t>(x)]);
    return out;
}

} // namespace morseflow
