#pragma once

// Plain-text edge list exchange format: one edge per line,
// row_id <TAB> col_id [<TAB> weight], '#' starts a comment line.
// Writers emit edges sorted by (row id, col id) so exports are
// byte-stable across runs.

#include "nestkit/bipartite_graph.hpp"

#include <iosfwd>
#include <string>

namespace nestkit {

BipartiteGraph read_edge_list(std::istream& in);
BipartiteGraph load_edge_list(const std::string& path);

void write_edge_list(const BipartiteGraph& g, std::ostream& out);
void save_edge_list(const BipartiteGraph& g, const std::string& path);

// Shortest faithful text form; integral values print without a decimal part.
std::string format_number(double v);

}  // namespace nestkit
