#include "nestkit/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace nestkit {

namespace detail {

void require_two_by_two(std::size_t n_rows, std::size_t n_cols) {
    if (n_rows < 2 || n_cols < 2)
        throw std::runtime_error("metric requires at least two nodes per class, got " +
                                 std::to_string(n_rows) + "x" + std::to_string(n_cols));
}

namespace {

constexpr std::size_t kPackedBitBudget = 100'000'000;  // rows * cols cells

std::size_t merge_overlap(const std::vector<std::pair<int, double>>& a,
                          const std::vector<std::pair<int, double>>& b) {
    std::size_t count = 0, i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i].first < b[j].first) ++i;
        else if (a[i].first > b[j].first) ++j;
        else { ++count; ++i; ++j; }
    }
    return count;
}

// One side of the overlap sums. n_partner is the size of the opposite class,
// which sets the expectation denominator.
template <typename OverlapFn>
void side_sums(const std::vector<int>& deg, std::size_t n_partner,
               OverlapExpectation expectation, OverlapFn&& overlap_of,
               double& plain, double& centered) {
    const double np = static_cast<double>(n_partner);
    const double denom = expectation == OverlapExpectation::pairwise_rate ? np * np : np;
    for (std::size_t i = 0; i < deg.size(); ++i) {
        for (std::size_t j = i + 1; j < deg.size(); ++j) {
            if (deg[i] == deg[j]) continue;
            const std::size_t hi = deg[i] > deg[j] ? i : j;
            const std::size_t lo = deg[i] > deg[j] ? j : i;
            if (deg[lo] == 0) continue;
            const double o = static_cast<double>(overlap_of(hi, lo));
            const double expected =
                static_cast<double>(deg[hi]) * static_cast<double>(deg[lo]) / denom;
            plain += o / deg[lo];
            centered += (o - expected) / deg[lo];
        }
    }
}

}  // namespace

OverlapSums overlap_sums(const BipartiteGraph& g, OverlapExpectation expectation,
                         OverlapKernel kernel) {
    const auto row_deg = degrees(g, NodeClass::row);
    const auto col_deg = degrees(g, NodeClass::col);
    OverlapSums sums;

    bool use_bits = kernel == OverlapKernel::packed_bits;
    if (kernel == OverlapKernel::automatic)
        use_bits = g.num_rows() * g.num_cols() <= kPackedBitBudget;

    if (use_bits) {
        const BitMatrix fwd = bit_rows(g);
        const BitMatrix rev = bit_cols(g);
        side_sums(row_deg, g.num_cols(), expectation,
                  [&](std::size_t a, std::size_t b) { return fwd.overlap(a, b); },
                  sums.plain_rows, sums.centered_rows);
        side_sums(col_deg, g.num_rows(), expectation,
                  [&](std::size_t a, std::size_t b) { return rev.overlap(a, b); },
                  sums.plain_cols, sums.centered_cols);
    } else {
        side_sums(row_deg, g.num_cols(), expectation,
                  [&](std::size_t a, std::size_t b) {
                      return merge_overlap(g.row_neighbors(static_cast<int>(a)),
                                           g.row_neighbors(static_cast<int>(b)));
                  },
                  sums.plain_rows, sums.centered_rows);
        side_sums(col_deg, g.num_rows(), expectation,
                  [&](std::size_t a, std::size_t b) {
                      return merge_overlap(g.col_neighbors(static_cast<int>(a)),
                                           g.col_neighbors(static_cast<int>(b)));
                  },
                  sums.plain_cols, sums.centered_cols);
    }
    return sums;
}

double power_iteration_rho(const Eigen::MatrixXd& m, double tol, int max_iterations) {
    Eigen::VectorXd v = Eigen::VectorXd::Ones(m.rows());
    v /= v.norm();
    double rho_prev = -1.0;
    for (int it = 0; it < max_iterations; ++it) {
        const Eigen::VectorXd u = m.transpose() * v;
        const double rho = std::sqrt(u.squaredNorm());
        if (rho == 0.0) return 0.0;
        if (rho_prev >= 0.0 && std::abs(rho - rho_prev) <= tol * std::max(1.0, rho))
            return rho;
        rho_prev = rho;
        v = m * u;
        v /= v.norm();
    }
    throw std::runtime_error("spectral radius power iteration did not converge after " +
                             std::to_string(max_iterations) + " iterations");
}

}  // namespace detail

double nodf(const BipartiteGraph& g, const MetricOptions& opt) {
    detail::require_two_by_two(g.num_rows(), g.num_cols());
    const auto sums = detail::overlap_sums(g, opt.expectation, opt.kernel);
    const double nr = static_cast<double>(g.num_rows());
    const double nc = static_cast<double>(g.num_cols());
    const double pairs = nr * (nr - 1) / 2 + nc * (nc - 1) / 2;
    return (sums.plain_rows + sums.plain_cols) / pairs;
}

double discounted_nodf(const BipartiteGraph& g, const MetricOptions& opt) {
    detail::require_two_by_two(g.num_rows(), g.num_cols());
    const auto sums = detail::overlap_sums(g, opt.expectation, opt.kernel);
    const double nr = static_cast<double>(g.num_rows());
    const double nc = static_cast<double>(g.num_cols());
    return 2.0 / (nr + nc) *
           (sums.centered_rows / (nr - 1) + sums.centered_cols / (nc - 1));
}

double spectral_radius(const BipartiteGraph& g, const MetricOptions& opt) {
    detail::require_two_by_two(g.num_rows(), g.num_cols());
    // Power iteration on B B^T through the adjacency lists; never
    // materialises a dense matrix.
    const std::size_t nr = g.num_rows(), nc = g.num_cols();
    std::vector<double> v(nr, 1.0), u(nc), v2(nr);
    double norm = std::sqrt(static_cast<double>(nr));
    for (auto& x : v) x /= norm;

    double rho_prev = -1.0;
    for (int it = 0; it < opt.max_iterations; ++it) {
        std::fill(u.begin(), u.end(), 0.0);
        for (std::size_t c = 0; c < nc; ++c)
            for (const auto& [r, w] : g.col_neighbors(static_cast<int>(c)))
                u[c] += (opt.weighted ? w : 1.0) * v[static_cast<std::size_t>(r)];
        double sq = 0.0;
        for (double x : u) sq += x * x;
        const double rho = std::sqrt(sq);
        if (rho == 0.0) return 0.0;
        if (rho_prev >= 0.0 && std::abs(rho - rho_prev) <= opt.tol * std::max(1.0, rho))
            return rho;
        rho_prev = rho;
        std::fill(v2.begin(), v2.end(), 0.0);
        for (std::size_t r = 0; r < nr; ++r)
            for (const auto& [c, w] : g.row_neighbors(static_cast<int>(r)))
                v2[r] += (opt.weighted ? w : 1.0) * u[static_cast<std::size_t>(c)];
        double n2 = 0.0;
        for (double x : v2) n2 += x * x;
        n2 = std::sqrt(n2);
        for (std::size_t r = 0; r < nr; ++r) v[r] = v2[r] / n2;
    }
    throw std::runtime_error("spectral radius power iteration did not converge after " +
                             std::to_string(opt.max_iterations) + " iterations");
}

MetricValue compute_metric(const BipartiteGraph& g, Metric metric, const MetricOptions& opt) {
    switch (metric) {
        case Metric::nodf: return {metric, nodf(g, opt)};
        case Metric::discounted_nodf: return {metric, discounted_nodf(g, opt)};
        case Metric::spectral_radius: return {metric, spectral_radius(g, opt)};
    }
    throw std::invalid_argument("unknown metric");
}

Metric metric_from_name(const std::string& name) {
    if (name == "nodf") return Metric::nodf;
    if (name == "discounted-nodf") return Metric::discounted_nodf;
    if (name == "spectral-radius") return Metric::spectral_radius;
    throw std::invalid_argument("unknown metric '" + name +
                                "' (expected nodf, discounted-nodf or spectral-radius)");
}

std::string metric_name(Metric m) {
    switch (m) {
        case Metric::nodf: return "nodf";
        case Metric::discounted_nodf: return "discounted-nodf";
        case Metric::spectral_radius: return "spectral-radius";
    }
    return "?";
}

}  // namespace nestkit
