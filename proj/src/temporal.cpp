#include "nestkit/temporal.hpp"

#include "nestkit/communities.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace nestkit {

namespace {

// Per-date graphs before any universe restriction.
std::vector<BipartiteGraph> raw_graphs(const std::vector<PeeringSnapshot>& snapshots,
                                       const SeriesOptions& opt) {
    std::vector<BipartiteGraph> graphs;
    graphs.reserve(snapshots.size());
    if (opt.kind == SeriesKind::as_ixp) {
        for (const auto& s : snapshots) graphs.push_back(build_as_ixp(s, opt.as_ixp));
        return graphs;
    }
    const CountrySelection sel = select_networks(snapshots.back(), opt.selection);
    for (const auto& s : snapshots)
        graphs.push_back(build_as_country(s, opt.selection, &sel.networks));
    return graphs;
}

std::vector<std::string> intersect_ids(const std::vector<BipartiteGraph>& graphs,
                                       NodeClass klass) {
    std::set<std::string> common(graphs.front().ids(klass).begin(),
                                 graphs.front().ids(klass).end());
    for (std::size_t t = 1; t < graphs.size(); ++t) {
        std::set<std::string> next;
        for (const auto& id : graphs[t].ids(klass))
            if (common.count(id)) next.insert(id);
        common.swap(next);
    }
    return {common.begin(), common.end()};
}

}  // namespace

SnapshotSeries build_series(const std::vector<PeeringSnapshot>& snapshots,
                            const SeriesOptions& opt) {
    if (snapshots.size() < 2)
        throw std::invalid_argument("a series needs at least two snapshots");
    for (std::size_t t = 0; t < snapshots.size(); ++t) {
        if (snapshots[t].date.empty())
            throw std::invalid_argument("snapshot " + std::to_string(t) + " has no date");
        if (t > 0 && !(snapshots[t - 1].date < snapshots[t].date))
            throw std::invalid_argument("snapshot dates must be strictly increasing");
    }

    const auto graphs = raw_graphs(snapshots, opt);

    // Nodes present at every date.
    std::vector<std::string> rows = intersect_ids(graphs, NodeClass::row);
    std::vector<std::string> cols = intersect_ids(graphs, NodeClass::col);
    if (rows.empty() || cols.empty())
        throw std::runtime_error("no nodes persist through every snapshot");

    // Drop whatever the first date leaves disconnected.
    {
        const BipartiteGraph first = induced_subgraph(graphs.front(), rows, cols);
        const BipartiteGraph core = largest_connected_component(first);
        rows = core.row_ids();
        cols = core.col_ids();
        std::sort(rows.begin(), rows.end());
        std::sort(cols.begin(), cols.end());
    }

    // Exchange series: keep the dominant nested community of the first date.
    if (opt.kind == SeriesKind::as_ixp && opt.restrict_to_community) {
        const BipartiteGraph first = induced_subgraph(graphs.front(), rows, cols);
        OptimizeOptions oo;
        oo.objective = CommunityObjective::nestedness;
        oo.seed = opt.seed;
        oo.restarts = opt.restarts;
        const OptimizeResult res = optimize_communities(first, oo);

        const int k = res.partition.community_count();
        std::vector<std::size_t> row_count(static_cast<std::size_t>(k), 0);
        for (int c : res.partition.row_community) ++row_count[static_cast<std::size_t>(c)];
        int top = 0;
        for (int c = 1; c < k; ++c)
            if (row_count[static_cast<std::size_t>(c)] > row_count[static_cast<std::size_t>(top)]) top = c;

        std::vector<std::string> r2, c2;
        for (std::size_t i = 0; i < first.num_rows(); ++i)
            if (res.partition.row_community[i] == top) r2.push_back(first.row_ids()[i]);
        for (std::size_t j = 0; j < first.num_cols(); ++j)
            if (res.partition.col_community[j] == top) c2.push_back(first.col_ids()[j]);
        std::sort(r2.begin(), r2.end());
        std::sort(c2.begin(), c2.end());
        rows.swap(r2);
        cols.swap(c2);
        if (rows.empty() || cols.empty())
            throw std::runtime_error("dominant community is empty on one side");
    }

    SnapshotSeries series;
    series.kind = opt.kind;
    series.row_universe = rows;
    series.col_universe = cols;
    for (std::size_t t = 0; t < graphs.size(); ++t) {
        series.dates.push_back(snapshots[t].date);
        series.graphs.push_back(induced_subgraph(graphs[t], rows, cols));
    }
    return series;
}

double persistence(const SnapshotSeries& series, int horizon) {
    if (horizon < 1 || static_cast<std::size_t>(horizon) >= series.graphs.size())
        throw std::invalid_argument("horizon must fall inside the series");
    double sum = 0;
    std::size_t pairs = 0;
    for (std::size_t t = 0; t + static_cast<std::size_t>(horizon) < series.graphs.size(); ++t) {
        const BipartiteGraph& now = series.graphs[t];
        const BipartiteGraph& later = series.graphs[t + static_cast<std::size_t>(horizon)];
        if (now.num_edges() == 0) continue;
        std::size_t kept = 0;
        for (const auto& e : now.edges())
            if (later.has_edge(later.row_index(e.row), later.col_index(e.col))) ++kept;
        sum += static_cast<double>(kept) / static_cast<double>(now.num_edges());
        ++pairs;
    }
    if (pairs == 0) throw std::runtime_error("no links to follow at this horizon");
    return sum / static_cast<double>(pairs);
}

}  // namespace nestkit
