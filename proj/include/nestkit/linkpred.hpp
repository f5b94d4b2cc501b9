#pragma once

// Link prediction from occupancy regressed on degrees.
//
// A probit model fits cell occupancy on the features (row degree, column
// degree, degree product), by default without an intercept. Cells whose
// occupancy the model under-explains drive the predictions: absent cells
// with the most negative residual are creation candidates, present cells
// with the largest residual deletion candidates. Candidate lists swept in
// order against later snapshots give ROC curves.

#include "nestkit/bipartite_graph.hpp"
#include "nestkit/temporal.hpp"

#include <string>
#include <vector>

namespace nestkit {

struct ProbitOptions {
    bool include_intercept = false;
    double tol = 1e-8;        // gradient norm
    int max_iterations = 100;
    double clip = 37.0;       // linear predictor clamp for the normal cdf
};

struct ProbitFit {
    // (intercept,) row-degree, col-degree, product coefficients
    std::vector<double> coefficients;
    bool include_intercept = false;
    bool converged = false;
    bool clipped = false;  // linear predictor hit the clamp (separation)
    int iterations = 0;
    double log_likelihood = 0;
};

ProbitFit fit_probit(const BipartiteGraph& g, const ProbitOptions& opt = {});

double standard_normal_cdf(double z);

// Fitted occupancy probability for every cell, row-major.
Eigen::MatrixXd fitted_probabilities(const BipartiteGraph& g, const ProbitFit& fit);

enum class PredictionKind { creation, deletion };

struct Prediction {
    std::string row, col;
    double fitted = 0;
    double residual = 0;  // occupancy minus fitted
};

struct PredictionList {
    PredictionKind kind = PredictionKind::creation;
    std::vector<Prediction> items;  // strongest candidate first
};

PredictionList residuals(const BipartiteGraph& g, const ProbitFit& fit, PredictionKind kind);

struct RocPoint {
    double fpr = 0, tpr = 0;
};

struct RocResult {
    double auc = 0;
    std::size_t positives = 0, negatives = 0;
    std::vector<RocPoint> points;
};

// Sweep of a label sequence already in candidate order.
RocResult roc_from_labels(const std::vector<int>& ordered_labels);

// Labels a candidate list against the snapshots after `t_index`: a
// creation counts once the cell stays occupied for `persist` consecutive
// dates, a deletion once it stays empty that long.
RocResult evaluate(const SnapshotSeries& series, std::size_t t_index,
                   const PredictionList& predictions, int persist = 1);

}  // namespace nestkit
