#pragma once

// Community structure on bipartite graphs.
//
// Two objectives are supported: bipartite modularity (edge counts against
// the degree-product expectation) and in-block nestedness (the discounted
// overlap sums restricted to each community, with per-community
// normalisation). With everything in one community the in-block score
// equals discounted_nodf of the whole graph.
//
// optimize_communities maximises either objective by recursive bisection
// with extremal optimisation: start from a random balanced split, rank
// nodes by their fitness (own contribution over degree), flip a
// low-ranked node drawn with probability proportional to rank^-tau, keep
// the best split seen, stop after 3N consecutive non-improving flips, and
// recurse while a split improves the objective. Node updates are
// incremental; every accepted level is cross-checked against a fresh
// evaluation.

#include "nestkit/bipartite_graph.hpp"
#include "nestkit/metrics.hpp"

#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace nestkit {

struct Partition {
    std::vector<int> row_community;  // aligned with the row registry
    std::vector<int> col_community;

    int community_count() const;
};

Partition single_community(const BipartiteGraph& g);
Partition singleton_communities(const BipartiteGraph& g);

// Renumbers community ids to 0..k-1 in first-appearance order (rows first).
Partition normalized(const Partition& p);

double barber_modularity(const BipartiteGraph& g, const Partition& p);
double in_block_nestedness(const BipartiteGraph& g, const Partition& p,
                           const MetricOptions& opt = {});

enum class CommunityObjective { modularity, nestedness };

struct OptimizeOptions {
    CommunityObjective objective = CommunityObjective::nestedness;
    std::uint64_t seed = 0;
    int restarts = 1;               // seeds seed .. seed+restarts-1, best kept
    int non_improving_factor = 3;   // stop a level after factor*N flat flips
    double min_gain = 1e-12;        // accept a split only above this gain
    bool check_bookkeeping = true;  // verify incremental sums per level
    OverlapExpectation expectation = OverlapExpectation::pairwise_rate;
};

struct OptimizeResult {
    Partition partition;
    double objective_value = 0;  // fresh evaluation of the final partition
    int accepted_splits = 0;
    std::uint64_t seed = 0;      // winning restart
};

OptimizeResult optimize_communities(const BipartiteGraph& g, const OptimizeOptions& opt = {});

// Share of nodes and of row strength per community, plus the column
// attribute distribution (ISO country codes in the exchange-point setting)
// when one is supplied. Entries are sorted by row share, largest first.
struct CompositionEntry {
    int community = 0;
    std::size_t n_rows = 0, n_cols = 0;
    double row_share = 0;       // percent of all rows
    double col_share = 0;       // percent of all cols
    double strength_share = 0;  // percent of total row strength
    int unique_attributes = 0;
    std::vector<std::pair<std::string, int>> top_attributes;  // up to 5
};

struct CompositionReport {
    std::vector<CompositionEntry> entries;
};

CompositionReport composition_report(
    const BipartiteGraph& g, const Partition& p,
    const std::unordered_map<std::string, std::string>* col_attribute = nullptr);

}  // namespace nestkit
