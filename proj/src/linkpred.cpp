#include "nestkit/linkpred.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nestkit {

double standard_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

namespace {

double standard_normal_pdf(double z) {
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
}

struct Design {
    Eigen::MatrixXd x;   // cells x features
    Eigen::VectorXd y;   // occupancy
};

Design design_matrix(const BipartiteGraph& g, bool intercept) {
    const auto row_deg = degrees(g, NodeClass::row);
    const auto col_deg = degrees(g, NodeClass::col);
    const Eigen::Index cells =
        static_cast<Eigen::Index>(g.num_rows() * g.num_cols());
    const Eigen::Index k = intercept ? 4 : 3;
    Design d{Eigen::MatrixXd(cells, k), Eigen::VectorXd(cells)};
    Eigen::Index at = 0;
    for (std::size_t r = 0; r < g.num_rows(); ++r) {
        for (std::size_t c = 0; c < g.num_cols(); ++c, ++at) {
            const double dr = row_deg[r], dc = col_deg[c];
            Eigen::Index f = 0;
            if (intercept) d.x(at, f++) = 1.0;
            d.x(at, f++) = dr;
            d.x(at, f++) = dc;
            d.x(at, f) = dr * dc;
            d.y(at) = g.has_edge(static_cast<int>(r), static_cast<int>(c)) ? 1.0 : 0.0;
        }
    }
    return d;
}

double log_likelihood(const Design& d, const Eigen::VectorXd& theta, double clip,
                      bool* any_clipped) {
    double ll = 0;
    for (Eigen::Index i = 0; i < d.x.rows(); ++i) {
        double z = d.x.row(i).dot(theta);
        if (std::abs(z) > clip) {
            if (any_clipped) *any_clipped = true;
            z = std::clamp(z, -clip, clip);
        }
        // 1 - cdf(z) evaluated as cdf(-z): both tails stay well away from
        // zero inside the clamp, so the log never overflows.
        ll += std::log(standard_normal_cdf(d.y(i) == 1.0 ? z : -z));
    }
    return ll;
}

}  // namespace

ProbitFit fit_probit(const BipartiteGraph& g, const ProbitOptions& opt) {
    const Design d = design_matrix(g, opt.include_intercept);
    const Eigen::Index k = d.x.cols();
    if (d.y.minCoeff() == d.y.maxCoeff())
        throw std::runtime_error("probit fit: occupancy is constant across all cells");

    Eigen::VectorXd theta = Eigen::VectorXd::Zero(k);
    ProbitFit fit;
    fit.include_intercept = opt.include_intercept;

    bool clipped_now = false;
    double ll = log_likelihood(d, theta, opt.clip, &clipped_now);

    for (int it = 1; it <= opt.max_iterations; ++it) {
        Eigen::VectorXd grad = Eigen::VectorXd::Zero(k);
        Eigen::MatrixXd neg_hessian = Eigen::MatrixXd::Zero(k, k);
        clipped_now = false;
        for (Eigen::Index i = 0; i < d.x.rows(); ++i) {
            double z = d.x.row(i).dot(theta);
            if (std::abs(z) > opt.clip) {
                clipped_now = true;
                z = std::clamp(z, -opt.clip, opt.clip);
            }
            const double dens = standard_normal_pdf(z);
            double score, weight;
            if (d.y(i) == 1.0) {
                const double lambda = dens / standard_normal_cdf(z);
                score = lambda;
                weight = lambda * (lambda + z);
            } else {
                const double lambda = dens / standard_normal_cdf(-z);
                score = -lambda;
                weight = lambda * (lambda - z);
            }
            grad.noalias() += score * d.x.row(i).transpose();
            neg_hessian.noalias() += weight * d.x.row(i).transpose() * d.x.row(i);
        }

        fit.iterations = it;
        const double grad_norm = grad.norm();
        if (grad_norm < opt.tol) {
            fit.converged = !clipped_now;
            fit.clipped = clipped_now;
            break;
        }

        Eigen::LDLT<Eigen::MatrixXd> solver(neg_hessian);
        if (solver.info() != Eigen::Success || !solver.isPositive())
            throw std::runtime_error("probit fit: degree features are collinear");
        const Eigen::VectorXd step = solver.solve(grad);

        double scale = 1.0;
        Eigen::VectorXd trial;
        double trial_ll = ll;
        for (int half = 0; half < 40; ++half) {
            trial = theta + scale * step;
            trial_ll = log_likelihood(d, trial, opt.clip, nullptr);
            if (trial_ll >= ll) break;
            scale *= 0.5;
        }
        theta = trial;
        ll = trial_ll;

        if (it == opt.max_iterations) {
            fit.converged = false;
            fit.clipped = clipped_now;
        }
    }

    fit.coefficients.assign(theta.data(), theta.data() + k);
    fit.log_likelihood = ll;
    return fit;
}

Eigen::MatrixXd fitted_probabilities(const BipartiteGraph& g, const ProbitFit& fit) {
    const auto row_deg = degrees(g, NodeClass::row);
    const auto col_deg = degrees(g, NodeClass::col);
    const std::size_t off = fit.include_intercept ? 1 : 0;
    if (fit.coefficients.size() != off + 3)
        throw std::invalid_argument("probit fit has the wrong number of coefficients");
    Eigen::MatrixXd p(g.num_rows(), g.num_cols());
    for (std::size_t r = 0; r < g.num_rows(); ++r) {
        for (std::size_t c = 0; c < g.num_cols(); ++c) {
            const double dr = row_deg[r], dc = col_deg[c];
            double z = fit.include_intercept ? fit.coefficients[0] : 0.0;
            z += fit.coefficients[off] * dr + fit.coefficients[off + 1] * dc +
                 fit.coefficients[off + 2] * dr * dc;
            p(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                standard_normal_cdf(z);
        }
    }
    return p;
}

PredictionList residuals(const BipartiteGraph& g, const ProbitFit& fit, PredictionKind kind) {
    const Eigen::MatrixXd p = fitted_probabilities(g, fit);
    PredictionList list;
    list.kind = kind;
    for (std::size_t r = 0; r < g.num_rows(); ++r) {
        for (std::size_t c = 0; c < g.num_cols(); ++c) {
            const bool present = g.has_edge(static_cast<int>(r), static_cast<int>(c));
            if ((kind == PredictionKind::creation) == present) continue;
            Prediction pr;
            pr.row = g.row_ids()[r];
            pr.col = g.col_ids()[c];
            pr.fitted = p(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
            pr.residual = (present ? 1.0 : 0.0) - pr.fitted;
            list.items.push_back(std::move(pr));
        }
    }
    std::sort(list.items.begin(), list.items.end(), [&](const Prediction& a, const Prediction& b) {
        if (a.residual != b.residual)
            return kind == PredictionKind::creation ? a.residual < b.residual
                                                    : a.residual > b.residual;
        if (a.row != b.row) return a.row < b.row;
        return a.col < b.col;
    });
    return list;
}

RocResult roc_from_labels(const std::vector<int>& ordered_labels) {
    RocResult roc;
    for (int l : ordered_labels) (l ? roc.positives : roc.negatives)++;
    if (roc.positives == 0) throw std::runtime_error("roc needs at least one positive example");
    if (roc.negatives == 0) throw std::runtime_error("roc needs at least one negative example");

    roc.points.push_back({0, 0});
    std::size_t tp = 0, fp = 0;
    double auc = 0;
    for (int l : ordered_labels) {
        if (l) {
            ++tp;
        } else {
            ++fp;
            auc += static_cast<double>(tp);
        }
        roc.points.push_back({static_cast<double>(fp) / static_cast<double>(roc.negatives),
                              static_cast<double>(tp) / static_cast<double>(roc.positives)});
    }
    roc.auc = auc / (static_cast<double>(roc.positives) * static_cast<double>(roc.negatives));
    return roc;
}

RocResult evaluate(const SnapshotSeries& series, std::size_t t_index,
                   const PredictionList& predictions, int persist) {
    if (t_index >= series.graphs.size())
        throw std::invalid_argument("snapshot index outside the series");
    if (persist < 1) throw std::invalid_argument("persist must be at least 1");
    const std::size_t window = static_cast<std::size_t>(persist);
    if (t_index + window + 1 > series.graphs.size())
        throw std::invalid_argument("not enough snapshots after the prediction date");

    std::vector<int> labels;
    labels.reserve(predictions.items.size());
    for (const auto& pr : predictions.items) {
        int label = 0;
        for (std::size_t u = t_index + 1; u + window <= series.graphs.size(); ++u) {
            bool all = true;
            for (std::size_t v = u; v < u + window; ++v) {
                const BipartiteGraph& gv = series.graphs[v];
                const int ri = gv.row_index(pr.row), ci = gv.col_index(pr.col);
                if (ri < 0 || ci < 0)
                    throw std::invalid_argument("prediction references a node outside the series: " +
                                                pr.row + "/" + pr.col);
                const bool present = gv.has_edge(ri, ci);
                const bool want = predictions.kind == PredictionKind::creation;
                if (present != want) { all = false; break; }
            }
            if (all) { label = 1; break; }
        }
        labels.push_back(label);
    }
    return roc_from_labels(labels);
}

}  // namespace nestkit
