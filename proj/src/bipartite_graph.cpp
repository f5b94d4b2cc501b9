#include "nestkit/bipartite_graph.hpp"

#include <algorithm>
#include <bit>
#include <queue>
#include <stdexcept>

namespace nestkit {

namespace {

int intern(const std::string& id, std::vector<std::string>& ids,
           std::unordered_map<std::string, int>& lookup) {
    auto it = lookup.find(id);
    if (it != lookup.end()) return it->second;
    const int idx = static_cast<int>(ids.size());
    ids.push_back(id);
    lookup.emplace(id, idx);
    return idx;
}

}  // namespace

BipartiteGraph BipartiteGraph::build(const std::vector<EdgeRecord>& edges,
                                     std::vector<std::string> row_registry,
                                     std::vector<std::string> col_registry) {
    BipartiteGraph g;
    const bool fixed_rows = !row_registry.empty();
    const bool fixed_cols = !col_registry.empty();
    if (fixed_rows) {
        g.row_ids_ = std::move(row_registry);
        for (std::size_t i = 0; i < g.row_ids_.size(); ++i) {
            if (!g.row_lookup_.emplace(g.row_ids_[i], static_cast<int>(i)).second)
                throw std::runtime_error("duplicate row id in registry: " + g.row_ids_[i]);
        }
    }
    if (fixed_cols) {
        g.col_ids_ = std::move(col_registry);
        for (std::size_t i = 0; i < g.col_ids_.size(); ++i) {
            if (!g.col_lookup_.emplace(g.col_ids_[i], static_cast<int>(i)).second)
                throw std::runtime_error("duplicate column id in registry: " + g.col_ids_[i]);
        }
    }

    std::vector<std::pair<std::pair<int, int>, double>> indexed;
    indexed.reserve(edges.size());
    for (const auto& e : edges) {
        int r, c;
        if (fixed_rows) {
            auto it = g.row_lookup_.find(e.row);
            if (it == g.row_lookup_.end())
                throw std::runtime_error("edge references unregistered row id: " + e.row);
            r = it->second;
        } else {
            r = intern(e.row, g.row_ids_, g.row_lookup_);
        }
        if (fixed_cols) {
            auto it = g.col_lookup_.find(e.col);
            if (it == g.col_lookup_.end())
                throw std::runtime_error("edge references unregistered column id: " + e.col);
            c = it->second;
        } else {
            c = intern(e.col, g.col_ids_, g.col_lookup_);
        }
        indexed.push_back({{r, c}, e.weight});
        if (e.weight != 1.0) g.weighted_ = true;
    }

    if (g.row_ids_.empty() || g.col_ids_.empty())
        throw std::runtime_error("bipartite graph requires at least one node in each class");

    g.row_adj_.resize(g.row_ids_.size());
    g.col_adj_.resize(g.col_ids_.size());
    for (const auto& [rc, w] : indexed) g.row_adj_[static_cast<std::size_t>(rc.first)].push_back({rc.second, w});

    for (std::size_t r = 0; r < g.row_adj_.size(); ++r) {
        auto& adj = g.row_adj_[r];
        std::sort(adj.begin(), adj.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        for (std::size_t i = 1; i < adj.size(); ++i) {
            if (adj[i].first == adj[i - 1].first)
                throw std::runtime_error("duplicate edge: " + g.row_ids_[r] + " / " +
                                         g.col_ids_[static_cast<std::size_t>(adj[i].first)]);
        }
        for (const auto& [c, w] : adj) g.col_adj_[static_cast<std::size_t>(c)].push_back({static_cast<int>(r), w});
        g.n_edges_ += adj.size();
    }
    return g;
}

int BipartiteGraph::row_index(const std::string& id) const {
    auto it = row_lookup_.find(id);
    return it == row_lookup_.end() ? -1 : it->second;
}

int BipartiteGraph::col_index(const std::string& id) const {
    auto it = col_lookup_.find(id);
    return it == col_lookup_.end() ? -1 : it->second;
}

bool BipartiteGraph::has_edge(int r, int c) const {
    const auto& adj = row_adj_[static_cast<std::size_t>(r)];
    auto it = std::lower_bound(adj.begin(), adj.end(), c,
                               [](const auto& a, int v) { return a.first < v; });
    return it != adj.end() && it->first == c;
}

double BipartiteGraph::edge_weight(int r, int c) const {
    const auto& adj = row_adj_[static_cast<std::size_t>(r)];
    auto it = std::lower_bound(adj.begin(), adj.end(), c,
                               [](const auto& a, int v) { return a.first < v; });
    return (it != adj.end() && it->first == c) ? it->second : 0.0;
}

std::vector<EdgeRecord> BipartiteGraph::edges() const {
    std::vector<EdgeRecord> out;
    out.reserve(n_edges_);
    for (std::size_t r = 0; r < row_adj_.size(); ++r)
        for (const auto& [c, w] : row_adj_[r])
            out.push_back({row_ids_[r], col_ids_[static_cast<std::size_t>(c)], w});
    return out;
}

GraphDiagnostics diagnostics(const BipartiteGraph& g) {
    GraphDiagnostics d;
    d.n_rows = g.num_rows();
    d.n_cols = g.num_cols();
    d.n_edges = g.num_edges();
    d.weighted = g.weighted();
    const double cells = static_cast<double>(d.n_rows) * static_cast<double>(d.n_cols);
    d.fill = cells > 0 ? static_cast<double>(d.n_edges) / cells : 0.0;
    const double total = static_cast<double>(d.n_rows + d.n_cols);
    d.eccentricity = total > 0
        ? std::abs(static_cast<double>(d.n_rows) - static_cast<double>(d.n_cols)) / total
        : 0.0;

    // BFS over both classes; nodes are (class, index).
    const std::size_t n = d.n_rows + d.n_cols;
    if (n == 0) {
        d.is_connected = false;
        return d;
    }
    std::vector<char> seen(n, 0);
    std::queue<std::size_t> q;
    q.push(0);
    seen[0] = 1;
    std::size_t reached = 1;
    while (!q.empty()) {
        const std::size_t v = q.front();
        q.pop();
        if (v < d.n_rows) {
            for (const auto& [c, w] : g.row_neighbors(static_cast<int>(v))) {
                (void)w;
                const std::size_t u = d.n_rows + static_cast<std::size_t>(c);
                if (!seen[u]) { seen[u] = 1; ++reached; q.push(u); }
            }
        } else {
            for (const auto& [r, w] : g.col_neighbors(static_cast<int>(v - d.n_rows))) {
                (void)w;
                const std::size_t u = static_cast<std::size_t>(r);
                if (!seen[u]) { seen[u] = 1; ++reached; q.push(u); }
            }
        }
    }
    d.is_connected = reached == n;
    return d;
}

namespace {

// Component labels over (rows then cols); -1 for untouched isolated nodes is
// not possible since every node gets a label, isolated ones their own.
std::vector<int> component_labels(const BipartiteGraph& g, int& n_components) {
    const std::size_t nr = g.num_rows(), n = nr + g.num_cols();
    std::vector<int> label(n, -1);
    n_components = 0;
    for (std::size_t start = 0; start < n; ++start) {
        if (label[start] != -1) continue;
        const int comp = n_components++;
        std::queue<std::size_t> q;
        q.push(start);
        label[start] = comp;
        while (!q.empty()) {
            const std::size_t v = q.front();
            q.pop();
            if (v < nr) {
                for (const auto& [c, w] : g.row_neighbors(static_cast<int>(v))) {
                    (void)w;
                    const std::size_t u = nr + static_cast<std::size_t>(c);
                    if (label[u] == -1) { label[u] = comp; q.push(u); }
                }
            } else {
                for (const auto& [r, w] : g.col_neighbors(static_cast<int>(v - nr))) {
                    (void)w;
                    const std::size_t u = static_cast<std::size_t>(r);
                    if (label[u] == -1) { label[u] = comp; q.push(u); }
                }
            }
        }
    }
    return label;
}

BipartiteGraph subgraph_by_flags(const BipartiteGraph& g, const std::vector<char>& keep_row,
                                 const std::vector<char>& keep_col) {
    std::vector<std::string> rows, cols;
    for (std::size_t r = 0; r < g.num_rows(); ++r)
        if (keep_row[r]) rows.push_back(g.row_ids()[r]);
    for (std::size_t c = 0; c < g.num_cols(); ++c)
        if (keep_col[c]) cols.push_back(g.col_ids()[c]);
    std::vector<EdgeRecord> edges;
    for (std::size_t r = 0; r < g.num_rows(); ++r) {
        if (!keep_row[r]) continue;
        for (const auto& [c, w] : g.row_neighbors(static_cast<int>(r)))
            if (keep_col[static_cast<std::size_t>(c)])
                edges.push_back({g.row_ids()[r], g.col_ids()[static_cast<std::size_t>(c)], w});
    }
    return BipartiteGraph::build(edges, std::move(rows), std::move(cols));
}

}  // namespace

BipartiteGraph largest_connected_component(const BipartiteGraph& g) {
    int n_components = 0;
    const auto label = component_labels(g, n_components);
    const std::size_t nr = g.num_rows();

    std::vector<std::size_t> size(static_cast<std::size_t>(n_components), 0);
    for (int l : label) ++size[static_cast<std::size_t>(l)];

    // Sorted (class tag, id) sequence per component, only materialised for
    // candidates tied on size.
    std::size_t best_size = 0;
    for (std::size_t s : size) best_size = std::max(best_size, s);
    std::vector<int> candidates;
    for (int comp = 0; comp < n_components; ++comp)
        if (size[static_cast<std::size_t>(comp)] == best_size) candidates.push_back(comp);

    int winner = candidates.front();
    if (candidates.size() > 1) {
        auto key = [&](int comp) {
            std::vector<std::pair<int, std::string>> ids;
            for (std::size_t v = 0; v < label.size(); ++v) {
                if (label[v] != comp) continue;
                if (v < nr) ids.push_back({0, g.row_ids()[v]});
                else ids.push_back({1, g.col_ids()[v - nr]});
            }
            std::sort(ids.begin(), ids.end());
            return ids;
        };
        auto best_key = key(winner);
        for (std::size_t i = 1; i < candidates.size(); ++i) {
            auto k = key(candidates[i]);
            if (k < best_key) { winner = candidates[i]; best_key = std::move(k); }
        }
    }

    std::vector<char> keep_row(g.num_rows(), 0), keep_col(g.num_cols(), 0);
    for (std::size_t v = 0; v < label.size(); ++v) {
        if (label[v] != winner) continue;
        if (v < nr) keep_row[v] = 1;
        else keep_col[v - nr] = 1;
    }
    return subgraph_by_flags(g, keep_row, keep_col);
}

BipartiteGraph degree_filter(const BipartiteGraph& g, int min_row_degree) {
    std::vector<char> keep_row(g.num_rows(), 0), keep_col(g.num_cols(), 0);
    for (std::size_t r = 0; r < g.num_rows(); ++r)
        keep_row[r] = g.row_neighbors(static_cast<int>(r)).size() >=
                      static_cast<std::size_t>(min_row_degree);
    for (std::size_t c = 0; c < g.num_cols(); ++c) {
        for (const auto& [r, w] : g.col_neighbors(static_cast<int>(c))) {
            (void)w;
            if (keep_row[static_cast<std::size_t>(r)]) { keep_col[c] = 1; break; }
        }
    }
    bool any_row = false, any_col = false;
    for (char k : keep_row) any_row |= k != 0;
    for (char k : keep_col) any_col |= k != 0;
    if (!any_row || !any_col) throw std::runtime_error("graph emptied by filter");
    return largest_connected_component(subgraph_by_flags(g, keep_row, keep_col));
}

BipartiteGraph induced_subgraph(const BipartiteGraph& g,
                                const std::vector<std::string>& rows_keep,
                                const std::vector<std::string>& cols_keep) {
    std::vector<char> keep_row(g.num_rows(), 0), keep_col(g.num_cols(), 0);
    for (const auto& id : rows_keep) {
        const int r = g.row_index(id);
        if (r < 0) throw std::runtime_error("induced subgraph: unknown row id: " + id);
        keep_row[static_cast<std::size_t>(r)] = 1;
    }
    for (const auto& id : cols_keep) {
        const int c = g.col_index(id);
        if (c < 0) throw std::runtime_error("induced subgraph: unknown column id: " + id);
        keep_col[static_cast<std::size_t>(c)] = 1;
    }
    std::vector<EdgeRecord> edges;
    for (const auto& id : rows_keep) {
        const int r = g.row_index(id);
        for (const auto& [c, w] : g.row_neighbors(r))
            if (keep_col[static_cast<std::size_t>(c)])
                edges.push_back({id, g.col_ids()[static_cast<std::size_t>(c)], w});
    }
    return BipartiteGraph::build(edges, rows_keep, cols_keep);
}

std::vector<int> degrees(const BipartiteGraph& g, NodeClass k) {
    const std::size_t n = k == NodeClass::row ? g.num_rows() : g.num_cols();
    std::vector<int> d(n);
    for (std::size_t i = 0; i < n; ++i)
        d[i] = static_cast<int>(k == NodeClass::row
                                    ? g.row_neighbors(static_cast<int>(i)).size()
                                    : g.col_neighbors(static_cast<int>(i)).size());
    return d;
}

std::vector<double> strengths(const BipartiteGraph& g, NodeClass k) {
    const std::size_t n = k == NodeClass::row ? g.num_rows() : g.num_cols();
    std::vector<double> s(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& adj = k == NodeClass::row ? g.row_neighbors(static_cast<int>(i))
                                              : g.col_neighbors(static_cast<int>(i));
        for (const auto& [j, w] : adj) { (void)j; s[i] += w; }
    }
    return s;
}

void BitMatrix::resize(std::size_t r, std::size_t c) {
    rows = r;
    cols = c;
    words = (c + 63) / 64;
    bits.assign(r * words, 0);
}

std::size_t BitMatrix::overlap(std::size_t a, std::size_t b) const {
    const std::uint64_t* pa = row_ptr(a);
    const std::uint64_t* pb = row_ptr(b);
    std::size_t count = 0;
    for (std::size_t w = 0; w < words; ++w) count += static_cast<std::size_t>(std::popcount(pa[w] & pb[w]));
    return count;
}

BitMatrix bit_rows(const BipartiteGraph& g) {
    BitMatrix m;
    m.resize(g.num_rows(), g.num_cols());
    for (std::size_t r = 0; r < g.num_rows(); ++r)
        for (const auto& [c, w] : g.row_neighbors(static_cast<int>(r))) {
            (void)w;
            m.set(r, static_cast<std::size_t>(c));
        }
    return m;
}

BitMatrix bit_cols(const BipartiteGraph& g) {
    BitMatrix m;
    m.resize(g.num_cols(), g.num_rows());
    for (std::size_t c = 0; c < g.num_cols(); ++c)
        for (const auto& [r, w] : g.col_neighbors(static_cast<int>(c))) {
            (void)w;
            m.set(c, static_cast<std::size_t>(r));
        }
    return m;
}

Eigen::MatrixXd dense_biadjacency(const BipartiteGraph& g, bool use_weights) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(g.num_rows()),
                                              static_cast<Eigen::Index>(g.num_cols()));
    for (std::size_t r = 0; r < g.num_rows(); ++r)
        for (const auto& [c, w] : g.row_neighbors(static_cast<int>(r)))
            m(static_cast<Eigen::Index>(r), c) = use_weights ? w : 1.0;
    return m;
}

BipartiteGraph graph_from_dense(const Eigen::MatrixXd& m) {
    std::vector<EdgeRecord> edges;
    std::vector<std::string> rows, cols;
    for (Eigen::Index r = 0; r < m.rows(); ++r) rows.push_back("r" + std::to_string(r));
    for (Eigen::Index c = 0; c < m.cols(); ++c) cols.push_back("c" + std::to_string(c));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            if (m(r, c) != 0.0)
                edges.push_back({rows[static_cast<std::size_t>(r)],
                                 cols[static_cast<std::size_t>(c)], m(r, c)});
    return BipartiteGraph::build(edges, rows, cols);
}

}  // namespace nestkit
