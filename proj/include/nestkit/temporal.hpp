#pragma once

// Monthly snapshot series over a fixed node universe.
//
// The universe is the intersection of the per-date node sets, restricted
// to the largest connected component of the first snapshot; the exchange
// series is further restricted to the dominant nested community of the
// first snapshot. Every graph in a series shares identical registries, so
// cells line up across dates.

#include "nestkit/bipartite_graph.hpp"
#include "nestkit/peeringdb.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace nestkit {

enum class SeriesKind { as_ixp, as_country };

struct SnapshotSeries {
    SeriesKind kind = SeriesKind::as_ixp;
    std::vector<std::string> dates;      // ascending
    std::vector<BipartiteGraph> graphs;  // aligned with dates, shared registries
    std::vector<std::string> row_universe, col_universe;
};

struct SeriesOptions {
    SeriesKind kind = SeriesKind::as_ixp;
    AsIxpOptions as_ixp;            // per-date exchange graph construction
    SelectionConfig selection;      // country series: computed on the last date
    bool restrict_to_community = true;  // exchange series only
    std::uint64_t seed = 0;
    int restarts = 20;              // community search restarts
};

SnapshotSeries build_series(const std::vector<PeeringSnapshot>& snapshots,
                            const SeriesOptions& opt = {});

// Mean over date pairs (t, t+horizon) of the fraction of date-t links
// still present at date t+horizon. Pairs with no links at date t are
// skipped.
double persistence(const SnapshotSeries& series, int horizon);

}  // namespace nestkit
