#include "nestkit/edgelist_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace nestkit {

std::string format_number(double v) {
    if (std::isfinite(v) && v == std::floor(v) && std::abs(v) < 1e15) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.0f", v);
        return buf;
    }
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

BipartiteGraph read_edge_list(std::istream& in) {
    std::vector<EdgeRecord> edges;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;

        std::vector<std::string> fields;
        std::size_t pos = 0;
        while (true) {
            const auto tab = line.find('\t', pos);
            fields.push_back(line.substr(pos, tab == std::string::npos ? tab : tab - pos));
            if (tab == std::string::npos) break;
            pos = tab + 1;
        }
        if (fields.size() < 2 || fields.size() > 3 || fields[0].empty() || fields[1].empty())
            throw std::runtime_error("edge list line " + std::to_string(lineno) +
                                     ": expected row<TAB>col[<TAB>weight]");
        EdgeRecord e{fields[0], fields[1], 1.0};
        if (fields.size() == 3) {
            try {
                std::size_t used = 0;
                e.weight = std::stod(fields[2], &used);
                if (used != fields[2].size()) throw std::invalid_argument("trailing");
            } catch (const std::exception&) {
                throw std::runtime_error("edge list line " + std::to_string(lineno) +
                                         ": bad weight '" + fields[2] + "'");
            }
        }
        edges.push_back(std::move(e));
    }
    if (edges.empty()) throw std::runtime_error("edge list contains no edges");
    return BipartiteGraph::build(edges);
}

BipartiteGraph load_edge_list(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open edge list: " + path);
    try {
        return read_edge_list(in);
    } catch (const std::runtime_error& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

void write_edge_list(const BipartiteGraph& g, std::ostream& out) {
    auto edges = g.edges();
    std::sort(edges.begin(), edges.end(), [](const EdgeRecord& a, const EdgeRecord& b) {
        if (a.row != b.row) return a.row < b.row;
        return a.col < b.col;
    });
    const bool weighted = g.weighted();
    for (const auto& e : edges) {
        out << e.row << '\t' << e.col;
        if (weighted) out << '\t' << format_number(e.weight);
        out << '\n';
    }
}

void save_edge_list(const BipartiteGraph& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write edge list: " + path);
    write_edge_list(g, out);
}

}  // namespace nestkit
