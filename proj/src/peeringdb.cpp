#include "nestkit/peeringdb.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace nestkit {

namespace {

using nlohmann::json;

// Collections appear either as {"data": [...]} or as a bare array.
const json* collection(const json& root, const char* key) {
    auto it = root.find(key);
    if (it == root.end()) return nullptr;
    if (it->is_array()) return &*it;
    if (it->is_object()) {
        auto d = it->find("data");
        if (d != it->end() && d->is_array()) return &*d;
    }
    return nullptr;
}

// Integer-ish field to decimal string; empty when absent or malformed.
std::string id_string(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return "";
    if (it->is_number_integer()) return std::to_string(it->get<long long>());
    if (it->is_number_unsigned()) return std::to_string(it->get<unsigned long long>());
    if (it->is_string()) {
        const auto s = it->get<std::string>();
        if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) return "";
        return s;
    }
    return "";
}

std::string text_field(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_string()) return "";
    return it->get<std::string>();
}

double speed_field(const json& obj) {
    auto it = obj.find("speed");
    if (it == obj.end() || it->is_null()) return 0;
    if (it->is_number()) return it->get<double>();
    return 0;
}

}  // namespace

const NetworkRecord* PeeringSnapshot::network(const std::string& asn) const {
    auto it = network_index.find(asn);
    return it == network_index.end() ? nullptr : &networks[it->second];
}

const ExchangeRecord* PeeringSnapshot::exchange(const std::string& id) const {
    auto it = exchange_index.find(id);
    return it == exchange_index.end() ? nullptr : &exchanges[it->second];
}

std::unordered_map<std::string, std::string> PeeringSnapshot::exchange_countries() const {
    std::unordered_map<std::string, std::string> out;
    for (const auto& e : exchanges)
        if (!e.country.empty()) out.emplace(e.id, e.country);
    return out;
}

PeeringSnapshot parse_snapshot(const std::string& json_text, std::string date) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("snapshot is not valid JSON: ") + e.what());
    }
    if (!root.is_object()) throw std::runtime_error("snapshot root must be a JSON object");

    PeeringSnapshot snap;
    snap.date = std::move(date);

    const json* nets = collection(root, "net");
    const json* ixs = collection(root, "ix");
    const json* links = collection(root, "netixlan");
    if (!nets || !ixs || !links)
        throw std::runtime_error("snapshot must carry net, ix and netixlan collections");

    for (const auto& n : *nets) {
        if (!n.is_object()) { ++snap.dropped_networks; continue; }
        NetworkRecord rec;
        rec.asn = id_string(n, "asn");
        if (rec.asn.empty()) { ++snap.dropped_networks; continue; }
        if (snap.network_index.count(rec.asn)) { ++snap.dropped_networks; continue; }
        rec.name = text_field(n, "name");
        rec.info_ratio = text_field(n, "info_ratio");
        snap.network_index.emplace(rec.asn, snap.networks.size());
        snap.networks.push_back(std::move(rec));
    }
    for (const auto& x : *ixs) {
        if (!x.is_object()) { ++snap.dropped_exchanges; continue; }
        ExchangeRecord rec;
        rec.id = id_string(x, "id");
        if (rec.id.empty()) { ++snap.dropped_exchanges; continue; }
        if (snap.exchange_index.count(rec.id)) { ++snap.dropped_exchanges; continue; }
        rec.name = text_field(x, "name");
        rec.country = text_field(x, "country");
        snap.exchange_index.emplace(rec.id, snap.exchanges.size());
        snap.exchanges.push_back(std::move(rec));
    }

    std::map<std::pair<std::string, std::string>, double> merged;
    for (const auto& l : *links) {
        if (!l.is_object()) { ++snap.dropped_memberships; continue; }
        const std::string asn = id_string(l, "asn");
        const std::string ix = id_string(l, "ix_id");
        if (asn.empty() || ix.empty() || !snap.network_index.count(asn) ||
            !snap.exchange_index.count(ix)) {
            ++snap.dropped_memberships;
            continue;
        }
        auto [it, inserted] = merged.emplace(std::make_pair(asn, ix), 0.0);
        if (!inserted) ++snap.merged_memberships;
        it->second += speed_field(l);
    }
    snap.memberships.reserve(merged.size());
    for (const auto& [key, speed] : merged)
        snap.memberships.push_back({key.first, key.second, speed});
    return snap;
}

PeeringSnapshot load_snapshot(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open snapshot: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_snapshot(buf.str(), date_from_path(path));
}

std::string date_from_path(const std::string& path) {
    const auto slash = path.find_last_of('/');
    const std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
    std::string cleaned;
    for (char ch : base) cleaned += (ch >= '0' && ch <= '9') ? ch : ' ';
    std::istringstream fields(cleaned);
    std::vector<std::string> nums;
    for (std::string tok; fields >> tok;) nums.push_back(tok);
    for (std::size_t i = 0; i + 3 <= nums.size(); ++i) {
        if (nums[i].size() == 4 && nums[i + 1].size() == 2 && nums[i + 2].size() == 2)
            return nums[i] + "-" + nums[i + 1] + "-" + nums[i + 2];
    }
    return "";
}

BipartiteGraph build_as_ixp(const PeeringSnapshot& s, const AsIxpOptions& opt) {
    std::vector<EdgeRecord> edges;
    edges.reserve(s.memberships.size());
    for (const auto& m : s.memberships)
        edges.push_back({m.asn, m.ix_id, m.speed > 0 ? m.speed : 1.0});
    if (edges.empty()) throw std::runtime_error("snapshot has no usable memberships");
    BipartiteGraph g = BipartiteGraph::build(edges);
    if (opt.main_component) g = largest_connected_component(g);
    if (opt.apply_filter) g = degree_filter(g, opt.min_degree);
    return g;
}

RatioMultipliers ratio_multipliers(const std::string& info_ratio) {
    if (info_ratio == "Mostly Inbound") return {1, 2};
    if (info_ratio == "Heavy Inbound") return {1, 4};
    if (info_ratio == "Mostly Outbound") return {2, 1};
    if (info_ratio == "Heavy Outbound") return {4, 1};
    return {1, 1};  // Balanced, Not Disclosed, missing
}

namespace {

// Directed capacity graph: network nodes [0, nA), exchange nodes [nA, n).
struct DirectedCapacity {
    std::vector<std::string> as_ids;
    std::size_t n_as = 0, n = 0;
    // arcs as adjacency: per node, list of (target, weight)
    std::vector<std::vector<std::pair<int, double>>> out;
};

DirectedCapacity directed_capacity(const PeeringSnapshot& s, PageRankDirection direction) {
    DirectedCapacity d;
    std::unordered_map<std::string, int> as_index, ix_index;
    for (const auto& m : s.memberships) {
        if (!as_index.count(m.asn)) {
            as_index.emplace(m.asn, static_cast<int>(d.as_ids.size()));
            d.as_ids.push_back(m.asn);
        }
        if (!ix_index.count(m.ix_id))
            ix_index.emplace(m.ix_id, static_cast<int>(ix_index.size()));
    }
    d.n_as = d.as_ids.size();
    d.n = d.n_as + ix_index.size();
    d.out.resize(d.n);

    for (const auto& m : s.memberships) {
        const NetworkRecord* net = s.network(m.asn);
        const RatioMultipliers mult = ratio_multipliers(net ? net->info_ratio : "");
        const int a = as_index[m.asn];
        const int x = static_cast<int>(d.n_as) + ix_index[m.ix_id];
        const double w_out = m.speed * mult.outbound;  // network -> exchange
        const double w_in = m.speed * mult.inbound;    // exchange -> network
        if (direction == PageRankDirection::forward) {
            if (w_out > 0) d.out[static_cast<std::size_t>(a)].push_back({x, w_out});
            if (w_in > 0) d.out[static_cast<std::size_t>(x)].push_back({a, w_in});
        } else {
            if (w_out > 0) d.out[static_cast<std::size_t>(x)].push_back({a, w_out});
            if (w_in > 0) d.out[static_cast<std::size_t>(a)].push_back({x, w_in});
        }
    }
    return d;
}

}  // namespace

NodeRanking pagerank_scores(const PeeringSnapshot& s, PageRankDirection direction,
                            const SelectionConfig& cfg) {
    const DirectedCapacity d = directed_capacity(s, direction);
    if (d.n == 0) throw std::runtime_error("snapshot has no usable memberships");

    std::vector<double> out_weight(d.n, 0.0);
    for (std::size_t v = 0; v < d.n; ++v)
        for (const auto& [t, w] : d.out[v]) { (void)t; out_weight[v] += w; }

    const double n = static_cast<double>(d.n);
    std::vector<double> p(d.n, 1.0 / n), next(d.n);
    double residual = 0;
    for (int it = 0; it < cfg.max_iterations; ++it) {
        double dangling = 0;
        for (std::size_t v = 0; v < d.n; ++v)
            if (out_weight[v] == 0) dangling += p[v];
        std::fill(next.begin(), next.end(), (1.0 - cfg.damping) / n +
                                                cfg.damping * dangling / n);
        for (std::size_t v = 0; v < d.n; ++v) {
            if (out_weight[v] == 0) continue;
            const double share = cfg.damping * p[v] / out_weight[v];
            for (const auto& [t, w] : d.out[v]) next[static_cast<std::size_t>(t)] += share * w;
        }
        residual = 0;
        for (std::size_t v = 0; v < d.n; ++v) residual += std::abs(next[v] - p[v]);
        p.swap(next);
        if (residual < cfg.tol) {
            std::vector<double> as_scores(d.n_as);
            for (std::size_t a = 0; a < d.n_as; ++a) as_scores[a] = p[a];
            return build_ranking(NodeClass::row, RankMetric::pagerank, d.as_ids, as_scores);
        }
    }
    throw std::runtime_error("pagerank did not converge after " +
                             std::to_string(cfg.max_iterations) +
                             " iterations (residual " + std::to_string(residual) + ")");
}

CountrySelection select_networks(const PeeringSnapshot& s, const SelectionConfig& cfg) {
    CountrySelection sel;
    const AsIxpOptions unfiltered{4, false, true};
    const BipartiteGraph g = build_as_ixp(s, unfiltered);
    sel.by_degree = degree_ranking(g, NodeClass::row);
    sel.by_pagerank = pagerank_scores(s, PageRankDirection::forward, cfg);
    sel.by_reverse_pagerank = pagerank_scores(s, PageRankDirection::reverse, cfg);

    std::set<std::string> keep;
    auto take = [&](const NodeRanking& r) {
        const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(cfg.top_k),
                                                    r.order.size());
        for (std::size_t i = 0; i < k; ++i) keep.insert(r.order[i]);
    };
    take(sel.by_degree);
    take(sel.by_pagerank);
    take(sel.by_reverse_pagerank);
    sel.networks.assign(keep.begin(), keep.end());
    return sel;
}

BipartiteGraph build_as_country(const PeeringSnapshot& s, const SelectionConfig& cfg,
                                const std::vector<std::string>* selection,
                                std::size_t* excluded_no_country) {
    std::vector<std::string> chosen;
    if (selection) chosen = *selection;
    else chosen = select_networks(s, cfg).networks;

    std::set<std::string> wanted(chosen.begin(), chosen.end());
    std::map<std::pair<std::string, std::string>, double> capacity;
    std::size_t no_country = 0;
    for (const auto& m : s.memberships) {
        if (!wanted.count(m.asn)) continue;
        const ExchangeRecord* ix = s.exchange(m.ix_id);
        if (!ix || ix->country.empty()) {
            ++no_country;
            continue;
        }
        capacity[{m.asn, ix->country}] += m.speed;
    }
    if (excluded_no_country) *excluded_no_country = no_country;
    if (capacity.empty())
        throw std::runtime_error("no memberships with country information for the selection");
    std::vector<EdgeRecord> edges;
    edges.reserve(capacity.size());
    for (const auto& [key, speed] : capacity)
        edges.push_back({key.first, key.second, speed > 0 ? speed : 1.0});
    return largest_connected_component(BipartiteGraph::build(edges));
}

}  // namespace nestkit
