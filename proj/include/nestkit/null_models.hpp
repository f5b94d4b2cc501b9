#pragma once

// Null models and significance testing.
//
// The proportional model draws each cell (i, a) independently with
// probability (d(i)/n_cols + d(a)/n_rows) / 2, which preserves degrees in
// expectation (with shrinkage towards the mean degree). The corrected
// variant redraws whole samples until no row or column is empty. The
// weight shuffle permutes edge weights over a fixed topology.

#include "nestkit/bipartite_graph.hpp"
#include "nestkit/metrics.hpp"
#include "nestkit/rng.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace nestkit {

enum class NullModel { proportional, proportional_corrected, weight_shuffle };

struct NullModelOptions {
    int max_redraws = 1000;  // corrected variant: whole-sample rejection cap
};

// One draw. Deterministic in the rng state.
BipartiteGraph sample_null(const BipartiteGraph& g, NullModel model, Rng& rng,
                           const NullModelOptions& opt = {});

// Cell probabilities of the proportional model, row-major.
Eigen::MatrixXd proportional_probabilities(const BipartiteGraph& g);

struct SignificanceResult {
    Metric metric;
    NullModel model;
    double observed = 0;
    double p_value = 1;       // right tail, ties count as extreme, floored at 1/size
    double z_score = 0;       // +-infinity when the ensemble has zero spread
    double ensemble_mean = 0;
    double ensemble_std = 0;  // sample standard deviation
    bool degenerate = false;  // zero ensemble spread
    std::size_t ensemble_size = 0;
    std::uint64_t seed = 0;
    std::vector<double> ensemble_values;
};

// Ensemble member i is seeded with seed + i, so results are independent of
// the thread count and bit-reproducible for a given seed.
SignificanceResult significance(const BipartiteGraph& g, Metric metric, NullModel model,
                                std::size_t ensemble_size, std::uint64_t seed,
                                const MetricOptions& metric_opt = {},
                                const NullModelOptions& null_opt = {}, int threads = 1);

NullModel null_model_from_name(const std::string& name);
std::string null_model_name(NullModel m);

}  // namespace nestkit
