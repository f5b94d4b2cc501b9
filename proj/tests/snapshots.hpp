#pragma once

// Builders for synthetic PeeringDB-style dumps used across the ingest,
// series, and command-line tests.

#include <json.hpp>

#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace testutil {

struct Net {
    std::string asn;
    std::string ratio;  // declared traffic balance, may stay empty
};

struct Ix {
    std::string id;
    std::string country;
};

struct Link {
    std::string asn;
    std::string ix;
    double speed = 0;
};

inline std::string snapshot_json(const std::vector<Net>& nets, const std::vector<Ix>& ixs,
                                 const std::vector<Link>& links, bool wrapped = true) {
    nlohmann::json net_rows = nlohmann::json::array();
    for (const auto& n : nets) {
        nlohmann::json row{{"asn", std::stoll(n.asn)}, {"name", "AS" + n.asn}};
        if (!n.ratio.empty()) row["info_ratio"] = n.ratio;
        net_rows.push_back(std::move(row));
    }
    nlohmann::json ix_rows = nlohmann::json::array();
    for (const auto& x : ixs) {
        nlohmann::json row{{"id", std::stoll(x.id)}, {"name", "IX" + x.id}};
        if (!x.country.empty()) row["country"] = x.country;
        ix_rows.push_back(std::move(row));
    }
    nlohmann::json link_rows = nlohmann::json::array();
    for (const auto& l : links)
        link_rows.push_back({{"asn", std::stoll(l.asn)},
                             {"ix_id", std::stoll(l.ix)},
                             {"speed", l.speed}});

    nlohmann::json root;
    if (wrapped) {
        root["net"] = {{"data", std::move(net_rows)}};
        root["ix"] = {{"data", std::move(ix_rows)}};
        root["netixlan"] = {{"data", std::move(link_rows)}};
    } else {
        root["net"] = std::move(net_rows);
        root["ix"] = std::move(ix_rows);
        root["netixlan"] = std::move(link_rows);
    }
    return root.dump();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

}  // namespace testutil
