#pragma once

// Ingest of PeeringDB-style dumps and construction of the two analysis
// graphs: network x exchange point (rows are AS numbers, columns exchange
// ids, weights total port capacity in Mbit/s) and network x country
// (columns ISO country codes, weights capacity towards that country).
//
// The country graph covers a selection of networks: the union of the
// top-k by exchange degree, by PageRank and by reverse PageRank on the
// directed capacity graph, where a network's declared traffic ratio
// scales its outbound and inbound arc weights.

#include "nestkit/bipartite_graph.hpp"
#include "nestkit/ranking.hpp"

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace nestkit {

struct NetworkRecord {
    std::string asn;         // decimal string
    std::string name;
    std::string info_ratio;  // declared traffic balance, may be empty
};

struct ExchangeRecord {
    std::string id;  // decimal string
    std::string name;
    std::string country;  // ISO 3166-1 alpha-2, may be empty
};

struct MembershipRecord {
    std::string asn;
    std::string ix_id;
    double speed = 0;  // summed port capacity, Mbit/s
};

struct PeeringSnapshot {
    std::string date;  // YYYY-MM-DD when known
    std::vector<NetworkRecord> networks;
    std::vector<ExchangeRecord> exchanges;
    std::vector<MembershipRecord> memberships;  // deduplicated, speeds summed

    // ingest accounting
    std::size_t dropped_networks = 0;     // missing or duplicate asn
    std::size_t dropped_exchanges = 0;    // missing or duplicate id
    std::size_t dropped_memberships = 0;  // dangling asn or ix reference
    std::size_t merged_memberships = 0;   // extra rows folded into one link

    const NetworkRecord* network(const std::string& asn) const;
    const ExchangeRecord* exchange(const std::string& id) const;
    // country per exchange id, skipping empty codes
    std::unordered_map<std::string, std::string> exchange_countries() const;

    std::unordered_map<std::string, std::size_t> network_index, exchange_index;
};

PeeringSnapshot parse_snapshot(const std::string& json_text, std::string date = "");
PeeringSnapshot load_snapshot(const std::string& path);  // date taken from the filename

// First YYYY-MM-DD hidden in the basename digits, e.g.
// "peeringdb_2_dump_2021_03_01.json" -> "2021-03-01"; empty when absent.
std::string date_from_path(const std::string& path);

struct AsIxpOptions {
    int min_degree = 4;          // drop networks present at fewer exchanges
    bool apply_filter = true;
    bool main_component = true;
};

// Network x exchange graph. Zero total capacity still counts as presence
// and gets weight 1.
BipartiteGraph build_as_ixp(const PeeringSnapshot& s, const AsIxpOptions& opt = {});

// Outbound/inbound arc weight multipliers for a declared traffic ratio.
struct RatioMultipliers {
    double outbound = 1;
    double inbound = 1;
};
RatioMultipliers ratio_multipliers(const std::string& info_ratio);

enum class PageRankDirection { forward, reverse };

struct SelectionConfig {
    int top_k = 100;
    double damping = 0.85;
    double tol = 1e-10;  // L1 change per iteration
    int max_iterations = 1000;
};

// PageRank restricted to the network nodes of the directed capacity graph.
NodeRanking pagerank_scores(const PeeringSnapshot& s, PageRankDirection direction,
                            const SelectionConfig& cfg = {});

struct CountrySelection {
    std::vector<std::string> networks;  // sorted union of the three top-k sets
    NodeRanking by_degree, by_pagerank, by_reverse_pagerank;
};

CountrySelection select_networks(const PeeringSnapshot& s, const SelectionConfig& cfg = {});

// Network x country graph over a selection, reduced to its main component.
// When `selection` is null the selection is computed from this snapshot.
// Weights are summed capacity; zero capacity towards a country counts as
// weight 1. Memberships at exchanges without a country code are excluded;
// `excluded_no_country` (optional) receives their count.
BipartiteGraph build_as_country(const PeeringSnapshot& s, const SelectionConfig& cfg = {},
                                const std::vector<std::string>* selection = nullptr,
                                std::size_t* excluded_no_country = nullptr);

}  // namespace nestkit
