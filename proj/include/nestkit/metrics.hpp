#pragma once

// Nestedness and spectral structure of a bipartite graph.
//
//   nodf              overlap of neighbourhoods between nodes of strictly
//                     decreasing degree, normalised to [0, 1]
//   discounted_nodf   same overlap sums with the degree-expected overlap
//                     subtracted and a per-node normalisation; can be negative
//   spectral_radius   largest singular value of the (bi)adjacency matrix
//
// All three treat the graph as unweighted unless stated otherwise.

#include "nestkit/bipartite_graph.hpp"

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace nestkit {

enum class Metric { nodf, discounted_nodf, spectral_radius };

struct MetricValue {
    Metric metric;
    double value;
};

enum class OverlapExpectation {
    pairwise_rate,   // d(i) d(j) / n^2: per-partner co-occupancy rate (default)
    expected_count,  // d(i) d(j) / n: expected shared-partner count
};

enum class OverlapKernel {
    automatic,        // packed bits while rows*cols fits the budget, else merges
    packed_bits,
    adjacency_merge,
};

struct MetricOptions {
    OverlapExpectation expectation = OverlapExpectation::pairwise_rate;
    OverlapKernel kernel = OverlapKernel::automatic;
    bool weighted = false;       // spectral radius only
    double tol = 1e-10;          // power iteration relative tolerance
    int max_iterations = 10000;
};

double nodf(const BipartiteGraph& g, const MetricOptions& opt = {});
double discounted_nodf(const BipartiteGraph& g, const MetricOptions& opt = {});
double spectral_radius(const BipartiteGraph& g, const MetricOptions& opt = {});

MetricValue compute_metric(const BipartiteGraph& g, Metric metric,
                           const MetricOptions& opt = {});

Metric metric_from_name(const std::string& name);   // "nodf" | "discounted-nodf" | "spectral-radius"
std::string metric_name(Metric m);

namespace detail {

// Shared overlap-sum kernels. `fwd` holds one bitset per row over columns,
// `rev` the transpose. Degree vectors are plain neighbour counts.
struct OverlapSums {
    double plain_rows = 0, plain_cols = 0;
    double centered_rows = 0, centered_cols = 0;
};

OverlapSums overlap_sums(const BipartiteGraph& g, OverlapExpectation expectation,
                         OverlapKernel kernel);

double power_iteration_rho(const Eigen::MatrixXd& m, double tol, int max_iterations);

void require_two_by_two(std::size_t n_rows, std::size_t n_cols);

}  // namespace detail

// Dense-matrix entry points; any nonzero entry counts as an edge for the
// overlap metrics. Useful for expression-style call sites and tests.
template <typename Derived>
double nodf(const Eigen::MatrixBase<Derived>& m, const MetricOptions& opt = {}) {
    return nodf(graph_from_dense(m.template cast<double>().eval()), opt);
}

template <typename Derived>
double discounted_nodf(const Eigen::MatrixBase<Derived>& m, const MetricOptions& opt = {}) {
    return discounted_nodf(graph_from_dense(m.template cast<double>().eval()), opt);
}

template <typename Derived>
double spectral_radius(const Eigen::MatrixBase<Derived>& m, const MetricOptions& opt = {}) {
    detail::require_two_by_two(static_cast<std::size_t>(m.rows()),
                               static_cast<std::size_t>(m.cols()));
    return detail::power_iteration_rho(m.template cast<double>().eval(), opt.tol,
                                       opt.max_iterations);
}

}  // namespace nestkit
