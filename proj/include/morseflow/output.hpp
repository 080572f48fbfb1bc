#pragma once

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "morseflow/connections.hpp"

namespace morseflow {

/// 17 significant digits: enough to round-trip a double, so reruns diff clean.
inline std::string format_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct CsvWriter {
    std::ostringstream body;

    void comment(const std::string &line) { body << "# " << line << "\n"; }
    void header(const std::vector<std::string> &cols) { row_strings(cols); }
    void row_strings(const std::vector<std::string> &cells) {
        for (std::size_t i = 0; i < cells.size(); ++i)
            body << (i ? "," : "") << cells[i];
        body << "\n";
    }
    void row(const std::vector<double> &cells) {
        for (std::size_t i = 0; i < cells.size(); ++i)
            body << (i ? "," : "") << format_real(cells[i]);
        body << "\n";
    }
    std::string str() const { return body.str(); }
};

inline void write_text_file(const std::string &path, const std::string &content) {
    const std::filesystem::path p(path);
    if (p.has_parent_path())
        std::filesystem::create_directories(p.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw std::runtime_error("cannot write '" + path + "'");
    f << content;
}

inline std::uint64_t fnv1a64(const std::string &bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string fnv1a64_file(const std::string &path) {
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw std::runtime_error("cannot read '" + path + "' for digesting");
    std::ostringstream ss;
    ss << f.rdbuf();
    char buf[32];
    std::snprintf(buf, sizeof(buf), "fnv1a64:%016llx",
                  static_cast<unsigned long long>(fnv1a64(ss.str())));
    return buf;
}

/// Reproducibility sidecar: command line, model, seed, pinned tolerances and
/// a digest per emitted file. Deterministic commands reproduce the digests
/// bit-exactly; only the wall time differs between runs.
struct RunManifest {
    std::string command;
    std::string model_spec;
    unsigned long seed = 0;
    std::map<std::string, double> tolerances;
    std::vector<std::string> output_files;
    double wall_time_seconds = 0.0;

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["command"] = command;
        j["model"] = model_spec;
        j["seed"] = seed;
        j["tolerances"] = tolerances;
        nlohmann::json outs;
        for (const std::string &f : output_files)
            outs[std::filesystem::path(f).filename().string()] = fnv1a64_file(f);
        j["outputs"] = outs;
        j["wall_time_seconds"] = wall_time_seconds;
        return j;
    }
};

inline void write_manifest(const std::string &path, const RunManifest &m) {
    write_text_file(path, m.to_json().dump(2) + "\n");
}

inline std::string digraph_to_dot(const ConnectionDigraph &dg) {
    std::ostringstream os;
    os << "digraph connections {\n";
    for (const auto &id : dg.nodes)
        os << "  \"" << id_string(id) << "\";\n";
    for (const auto &e : dg.edges)
        os << "  \"" << id_string(dg.nodes[e.src]) << "\" -> \"" << id_string(dg.nodes[e.dst])
           << "\" [label=\"k=" << e.witness.mode << ",a=" << format_real(e.witness.amp)
           << "\"];\n";
    os << "}\n";
    return os.str();
}

inline nlohmann::json digraph_to_json(const ConnectionDigraph &dg) {
    nlohmann::json j;
    j["note"] = dg.note;
    j["aggregate_index"] = dg.aggregate_index;
    nlohmann::json nodes = nlohmann::json::array();
    for (std::size_t i = 0; i < dg.nodes.size(); ++i) {
        nlohmann::json n;
        n["id"] = id_string(dg.nodes[i]);
        n["branch"] = dg.nodes[i].n;
        n["zeros"] = dg.profiles[i].zeros;
        n["energy"] = dg.profiles[i].energy;
        nodes.push_back(n);
    }
    j["nodes"] = nodes;
    nlohmann::json edges = nlohmann::json::array();
    for (const auto &e : dg.edges) {
        nlohmann::json je;
        je["src"] = id_string(dg.nodes[e.src]);
        je["dst"] = id_string(dg.nodes[e.dst]);
        je["mode"] = e.witness.mode;
        je["amp"] = e.witness.amp;
        je["capture_time"] = e.witness.capture_time;
        edges.push_back(je);
    }
    j["edges"] = edges;
    nlohmann::json unc = nlohmann::json::array();
    for (const auto &u : dg.uncaptured) {
        nlohmann::json ju;
        ju["src"] = id_string(dg.nodes[u.src]);
        ju["mode"] = u.mode;
        ju["amp"] = u.amp;
        unc.push_back(ju);
    }
    j["uncaptured"] = unc;
    return j;
}

} // namespace morseflow
