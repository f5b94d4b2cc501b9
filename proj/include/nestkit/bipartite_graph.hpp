#pragma once

// Immutable bipartite graph over two node classes ("row" and "col").
// Node ids are opaque strings; every structural operation returns a new
// graph. Registry order is preserved so matrix views and exports are
// deterministic.

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace nestkit {

enum class NodeClass { row, col };

struct EdgeRecord {
    std::string row;
    std::string col;
    double weight = 1.0;
};

struct GraphDiagnostics {
    std::size_t n_rows = 0;
    std::size_t n_cols = 0;
    std::size_t n_edges = 0;
    double fill = 0.0;          // edges / (n_rows * n_cols)
    double eccentricity = 0.0;  // |n_rows - n_cols| / (n_rows + n_cols)
    bool is_connected = false;
    bool weighted = false;
};

class BipartiteGraph {
public:
    BipartiteGraph() = default;

    // Registries default to first appearance in `edges`. Explicit registries
    // may carry isolated nodes; edge endpoints must be registered. Duplicate
    // (row, col) pairs are an error, as is an empty node class.
    static BipartiteGraph build(const std::vector<EdgeRecord>& edges,
                                std::vector<std::string> row_registry = {},
                                std::vector<std::string> col_registry = {});

    std::size_t num_rows() const { return row_ids_.size(); }
    std::size_t num_cols() const { return col_ids_.size(); }
    std::size_t num_edges() const { return n_edges_; }
    bool weighted() const { return weighted_; }

    const std::vector<std::string>& row_ids() const { return row_ids_; }
    const std::vector<std::string>& col_ids() const { return col_ids_; }
    const std::vector<std::string>& ids(NodeClass k) const {
        return k == NodeClass::row ? row_ids_ : col_ids_;
    }

    // -1 when the id is not registered.
    int row_index(const std::string& id) const;
    int col_index(const std::string& id) const;

    // Neighbour lists sorted by partner index.
    const std::vector<std::pair<int, double>>& row_neighbors(int r) const {
        return row_adj_[static_cast<std::size_t>(r)];
    }
    const std::vector<std::pair<int, double>>& col_neighbors(int c) const {
        return col_adj_[static_cast<std::size_t>(c)];
    }

    bool has_edge(int r, int c) const;
    double edge_weight(int r, int c) const;  // 0 when absent

    // All edges in (row index, col index) order.
    std::vector<EdgeRecord> edges() const;

private:
    std::vector<std::string> row_ids_, col_ids_;
    std::unordered_map<std::string, int> row_lookup_, col_lookup_;
    std::vector<std::vector<std::pair<int, double>>> row_adj_, col_adj_;
    std::size_t n_edges_ = 0;
    bool weighted_ = false;
};

GraphDiagnostics diagnostics(const BipartiteGraph& g);

// Largest connected component by node count; ties broken by the smallest
// lexicographic node id set. Preserves registry order of the survivors.
BipartiteGraph largest_connected_component(const BipartiteGraph& g);

// Drops rows with degree < min_row_degree, then any columns left with
// degree zero, then keeps the largest connected component of what
// remains. One pass; not iterated to a fixed point. Throws when the
// filter leaves an empty node class.
BipartiteGraph degree_filter(const BipartiteGraph& g, int min_row_degree);

// Subgraph induced by the given ids (registry order follows the arguments).
// Unknown ids are an error.
BipartiteGraph induced_subgraph(const BipartiteGraph& g,
                                const std::vector<std::string>& rows_keep,
                                const std::vector<std::string>& cols_keep);

std::vector<int> degrees(const BipartiteGraph& g, NodeClass k);
std::vector<double> strengths(const BipartiteGraph& g, NodeClass k);

// Packed occupancy bits, one bitset per node of the chosen class.
struct BitMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::size_t words = 0;  // 64-bit words per row
    std::vector<std::uint64_t> bits;

    void resize(std::size_t r, std::size_t c);
    void set(std::size_t r, std::size_t c) {
        bits[r * words + c / 64] |= std::uint64_t{1} << (c % 64);
    }
    bool test(std::size_t r, std::size_t c) const {
        return (bits[r * words + c / 64] >> (c % 64)) & 1u;
    }
    const std::uint64_t* row_ptr(std::size_t r) const { return bits.data() + r * words; }
    std::size_t overlap(std::size_t a, std::size_t b) const;  // |row a AND row b|
};

BitMatrix bit_rows(const BipartiteGraph& g);  // rows x cols
BitMatrix bit_cols(const BipartiteGraph& g);  // cols x rows

Eigen::MatrixXd dense_biadjacency(const BipartiteGraph& g, bool use_weights = false);

// Graph from a dense 0/1 (or weighted) matrix with synthetic ids r0..rN / c0..cN.
BipartiteGraph graph_from_dense(const Eigen::MatrixXd& m);

}  // namespace nestkit
