#include "nestkit/null_models.hpp"

#include "nestkit/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace nestkit {

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += workers) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

Eigen::MatrixXd proportional_probabilities(const BipartiteGraph& g) {
    const auto row_deg = degrees(g, NodeClass::row);
    const auto col_deg = degrees(g, NodeClass::col);
    const double nr = static_cast<double>(g.num_rows());
    const double nc = static_cast<double>(g.num_cols());
    Eigen::MatrixXd p(g.num_rows(), g.num_cols());
    for (std::size_t r = 0; r < g.num_rows(); ++r)
        for (std::size_t c = 0; c < g.num_cols(); ++c)
            p(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                0.5 * (row_deg[r] / nc + col_deg[c] / nr);
    return p;
}

namespace {

BipartiteGraph sample_proportional(const BipartiteGraph& g, Rng& rng, bool corrected,
                                   int max_redraws) {
    const Eigen::MatrixXd p = proportional_probabilities(g);
    const std::size_t nr = g.num_rows(), nc = g.num_cols();

    std::vector<EdgeRecord> edges;
    std::vector<int> row_deg(nr), col_deg(nc);
    const char* empty_class = nullptr;
    for (int attempt = 0; attempt < (corrected ? max_redraws : 1); ++attempt) {
        edges.clear();
        std::fill(row_deg.begin(), row_deg.end(), 0);
        std::fill(col_deg.begin(), col_deg.end(), 0);
        for (std::size_t r = 0; r < nr; ++r) {
            for (std::size_t c = 0; c < nc; ++c) {
                if (rng.u01() < p(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c))) {
                    edges.push_back({g.row_ids()[r], g.col_ids()[c], 1.0});
                    ++row_deg[r];
                    ++col_deg[c];
                }
            }
        }
        if (!corrected) break;
        empty_class = nullptr;
        if (std::find(row_deg.begin(), row_deg.end(), 0) != row_deg.end())
            empty_class = "row";
        else if (std::find(col_deg.begin(), col_deg.end(), 0) != col_deg.end())
            empty_class = "column";
        if (!empty_class) break;
    }
    if (corrected && empty_class)
        throw std::runtime_error(std::string("connectivity-corrected sampling failed: an empty ") +
                                 empty_class + " persisted after " +
                                 std::to_string(max_redraws) + " redraws");
    return BipartiteGraph::build(edges, g.row_ids(), g.col_ids());
}

BipartiteGraph sample_weight_shuffle(const BipartiteGraph& g, Rng& rng) {
    if (!g.weighted())
        throw std::runtime_error("weight shuffle requires a weighted graph");
    auto edges = g.edges();  // canonical (row index, col index) order
    std::vector<double> weights;
    weights.reserve(edges.size());
    for (const auto& e : edges) weights.push_back(e.weight);
    rng.shuffle(weights);
    for (std::size_t i = 0; i < edges.size(); ++i) edges[i].weight = weights[i];
    return BipartiteGraph::build(edges, g.row_ids(), g.col_ids());
}

}  // namespace

BipartiteGraph sample_null(const BipartiteGraph& g, NullModel model, Rng& rng,
                           const NullModelOptions& opt) {
    switch (model) {
        case NullModel::proportional: return sample_proportional(g, rng, false, 1);
        case NullModel::proportional_corrected:
            return sample_proportional(g, rng, true, opt.max_redraws);
        case NullModel::weight_shuffle: return sample_weight_shuffle(g, rng);
    }
    throw std::invalid_argument("unknown null model");
}

SignificanceResult significance(const BipartiteGraph& g, Metric metric, NullModel model,
                                std::size_t ensemble_size, std::uint64_t seed,
                                const MetricOptions& metric_opt,
                                const NullModelOptions& null_opt, int threads) {
    if (ensemble_size < 100)
        throw std::invalid_argument("significance needs an ensemble of at least 100 samples");

    SignificanceResult res;
    res.metric = metric;
    res.model = model;
    res.ensemble_size = ensemble_size;
    res.seed = seed;
    res.observed = compute_metric(g, metric, metric_opt).value;
    res.ensemble_values.assign(ensemble_size, 0.0);

    std::string first_error;
    std::mutex error_mutex;
    parallel_for(ensemble_size, threads, [&](std::size_t i) {
        try {
            Rng rng(seed + i);
            const BipartiteGraph sample = sample_null(g, model, rng, null_opt);
            res.ensemble_values[i] = compute_metric(sample, metric, metric_opt).value;
        } catch (const std::exception& e) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (first_error.empty()) first_error = e.what();
        }
    });
    if (!first_error.empty()) throw std::runtime_error(first_error);

    std::size_t at_least = 0;
    bool all_equal = true;
    double mean = 0;
    for (double v : res.ensemble_values) {
        if (v >= res.observed) ++at_least;
        all_equal = all_equal && v == res.ensemble_values.front();
        mean += v;
    }
    mean /= static_cast<double>(ensemble_size);
    // a constant ensemble must come out with exactly zero spread; the
    // accumulated mean can be an ulp off, which would fake a tiny std
    if (all_equal) mean = res.ensemble_values.front();
    double var = 0;
    for (double v : res.ensemble_values) var += (v - mean) * (v - mean);
    var = ensemble_size > 1 ? var / static_cast<double>(ensemble_size - 1) : 0.0;

    res.ensemble_mean = mean;
    res.ensemble_std = std::sqrt(var);
    res.p_value = std::max(static_cast<double>(at_least), 1.0) /
                  static_cast<double>(ensemble_size);
    if (res.ensemble_std > 0) {
        res.z_score = (res.observed - mean) / res.ensemble_std;
    } else {
        res.degenerate = true;
        const double inf = std::numeric_limits<double>::infinity();
        res.z_score = res.observed > mean ? inf : res.observed < mean ? -inf : 0.0;
    }
    return res;
}

NullModel null_model_from_name(const std::string& name) {
    if (name == "proportional") return NullModel::proportional;
    if (name == "proportional-corrected") return NullModel::proportional_corrected;
    if (name == "weight-shuffle") return NullModel::weight_shuffle;
    throw std::invalid_argument("unknown null model '" + name +
                                "' (expected proportional, proportional-corrected or weight-shuffle)");
}

std::string null_model_name(NullModel m) {
    switch (m) {
        case NullModel::proportional: return "proportional";
        case NullModel::proportional_corrected: return "proportional-corrected";
        case NullModel::weight_shuffle: return "weight-shuffle";
    }
    return "?";
}

}  // namespace nestkit
