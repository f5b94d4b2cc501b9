#pragma once

// Shared fixtures and independent reference implementations. The
// reference code favours directness over speed: dense matrices, double
// loops, textbook formulas. Production code is checked against these,
// never the other way round.

#include "nestkit/bipartite_graph.hpp"
#include "nestkit/communities.hpp"
#include "nestkit/rng.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <string>
#include <tuple>
#include <vector>

namespace testutil {

using nestkit::BipartiteGraph;
using nestkit::EdgeRecord;

inline BipartiteGraph make_graph(
    const std::vector<std::tuple<std::string, std::string, double>>& edges,
    std::vector<std::string> rows = {}, std::vector<std::string> cols = {}) {
    std::vector<EdgeRecord> recs;
    for (const auto& [r, c, w] : edges) recs.push_back({r, c, w});
    return BipartiteGraph::build(recs, std::move(rows), std::move(cols));
}

inline BipartiteGraph unweighted(
    const std::vector<std::pair<std::string, std::string>>& edges) {
    std::vector<EdgeRecord> recs;
    for (const auto& [r, c] : edges) recs.push_back({r, c, 1.0});
    return BipartiteGraph::build(recs);
}

// Full staircase: row i occupies columns 0 .. n-1-i, so row degrees are
// n, n-1, .., 1 and column degrees likewise. All degrees distinct.
inline Eigen::MatrixXd staircase(int n) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n - i; ++j) m(i, j) = 1.0;
    return m;
}

// Uniformly random 0/1 matrix with exactly `ones` cells set.
inline Eigen::MatrixXd random_cells(int rows, int cols, int ones, nestkit::Rng& rng) {
    std::vector<int> idx(static_cast<std::size_t>(rows * cols));
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
    rng.shuffle(idx);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(rows, cols);
    for (int k = 0; k < ones; ++k) m(idx[static_cast<std::size_t>(k)] / cols,
                                     idx[static_cast<std::size_t>(k)] % cols) = 1.0;
    return m;
}

// Bernoulli(p) matrix, redrawn until no empty row or column.
inline Eigen::MatrixXd random_filled(int rows, int cols, double p, nestkit::Rng& rng) {
    for (;;) {
        Eigen::MatrixXd m(rows, cols);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) m(i, j) = rng.u01() < p ? 1.0 : 0.0;
        if ((m.rowwise().sum().array() > 0).all() && (m.colwise().sum().array() > 0).all())
            return m;
    }
}

// ------------------------------------------------------------ references

// Pairwise-overlap nestedness, straight from the definition: for each
// ordered-by-degree pair, the overlap over the smaller degree, counted
// when the degrees strictly decrease; averaged over all pairs both ways.
inline double nodf_reference(const Eigen::MatrixXd& m) {
    const Eigen::Index nr = m.rows(), nc = m.cols();
    Eigen::VectorXd rd = m.rowwise().sum(), cd = m.colwise().sum();
    double rows_sum = 0, cols_sum = 0;
    for (Eigen::Index i = 0; i < nr; ++i) {
        for (Eigen::Index j = i + 1; j < nr; ++j) {
            const auto [hi, lo] = rd(i) >= rd(j) ? std::pair{i, j} : std::pair{j, i};
            if (rd(hi) <= rd(lo) || rd(lo) == 0) continue;  // equal or empty: skip
            rows_sum += m.row(hi).dot(m.row(lo)) / rd(lo);
        }
    }
    for (Eigen::Index a = 0; a < nc; ++a) {
        for (Eigen::Index b = a + 1; b < nc; ++b) {
            const auto [hi, lo] = cd(a) >= cd(b) ? std::pair{a, b} : std::pair{b, a};
            if (cd(hi) <= cd(lo) || cd(lo) == 0) continue;
            cols_sum += m.col(hi).dot(m.col(lo)) / cd(lo);
        }
    }
    const double pairs = static_cast<double>(nr * (nr - 1)) / 2.0 +
                         static_cast<double>(nc * (nc - 1)) / 2.0;
    return (rows_sum + cols_sum) / pairs;
}

// Degree-discounted variant: overlaps centered on the expected value
// d(i) d(j) / n^2 (or / n), per-node normalisation, averaged with the
// 2/(nr+nc) prefactor.
inline double discounted_reference(const Eigen::MatrixXd& m, bool linear_expectation) {
    const Eigen::Index nr = m.rows(), nc = m.cols();
    Eigen::VectorXd rd = m.rowwise().sum(), cd = m.colwise().sum();
    const double col_div = linear_expectation ? static_cast<double>(nc)
                                              : static_cast<double>(nc) * static_cast<double>(nc);
    const double row_div = linear_expectation ? static_cast<double>(nr)
                                              : static_cast<double>(nr) * static_cast<double>(nr);
    double rows_sum = 0, cols_sum = 0;
    for (Eigen::Index i = 0; i < nr; ++i) {
        for (Eigen::Index j = i + 1; j < nr; ++j) {
            const auto [hi, lo] = rd(i) >= rd(j) ? std::pair{i, j} : std::pair{j, i};
            if (rd(hi) <= rd(lo) || rd(lo) == 0) continue;
            rows_sum += (m.row(hi).dot(m.row(lo)) - rd(hi) * rd(lo) / col_div) / rd(lo);
        }
    }
    for (Eigen::Index a = 0; a < nc; ++a) {
        for (Eigen::Index b = a + 1; b < nc; ++b) {
            const auto [hi, lo] = cd(a) >= cd(b) ? std::pair{a, b} : std::pair{b, a};
            if (cd(hi) <= cd(lo) || cd(lo) == 0) continue;
            cols_sum += (m.col(hi).dot(m.col(lo)) - cd(hi) * cd(lo) / row_div) / cd(lo);
        }
    }
    return 2.0 / static_cast<double>(nr + nc) *
           (rows_sum / static_cast<double>(nr - 1) + cols_sum / static_cast<double>(nc - 1));
}

// Same restriction per community block, same global degrees and
// expectations, per-community (size - 1) denominators.
inline double ibn_reference(const Eigen::MatrixXd& m, const nestkit::Partition& p,
                            bool linear_expectation = false) {
    const Eigen::Index nr = m.rows(), nc = m.cols();
    Eigen::VectorXd rd = m.rowwise().sum(), cd = m.colwise().sum();
    const double col_div = linear_expectation ? static_cast<double>(nc)
                                              : static_cast<double>(nc) * static_cast<double>(nc);
    const double row_div = linear_expectation ? static_cast<double>(nr)
                                              : static_cast<double>(nr) * static_cast<double>(nr);
    int k = 0;
    for (int c : p.row_community) k = std::max(k, c + 1);
    for (int c : p.col_community) k = std::max(k, c + 1);

    double total = 0;
    for (int comm = 0; comm < k; ++comm) {
        std::vector<Eigen::Index> rows, cols;
        for (Eigen::Index i = 0; i < nr; ++i)
            if (p.row_community[static_cast<std::size_t>(i)] == comm) rows.push_back(i);
        for (Eigen::Index a = 0; a < nc; ++a)
            if (p.col_community[static_cast<std::size_t>(a)] == comm) cols.push_back(a);

        double rows_sum = 0, cols_sum = 0;
        for (std::size_t x = 0; x < rows.size(); ++x) {
            for (std::size_t y = x + 1; y < rows.size(); ++y) {
                Eigen::Index i = rows[x], j = rows[y];
                if (rd(i) < rd(j)) std::swap(i, j);
                if (rd(i) <= rd(j) || rd(j) == 0) continue;
                double overlap = 0;  // restricted to this community's columns
                for (Eigen::Index a : cols) overlap += m(i, a) * m(j, a);
                rows_sum += (overlap - rd(i) * rd(j) / col_div) / rd(j);
            }
        }
        for (std::size_t x = 0; x < cols.size(); ++x) {
            for (std::size_t y = x + 1; y < cols.size(); ++y) {
                Eigen::Index a = cols[x], b = cols[y];
                if (cd(a) < cd(b)) std::swap(a, b);
                if (cd(a) <= cd(b) || cd(b) == 0) continue;
                double overlap = 0;
                for (Eigen::Index i : rows) overlap += m(i, a) * m(i, b);
                cols_sum += (overlap - cd(a) * cd(b) / row_div) / cd(b);
            }
        }
        if (rows.size() > 1) total += rows_sum / static_cast<double>(rows.size() - 1);
        if (cols.size() > 1) total += cols_sum / static_cast<double>(cols.size() - 1);
    }
    return 2.0 / static_cast<double>(nr + nc) * total;
}

inline double rho_reference(const Eigen::MatrixXd& m) {
    return Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues()(0);
}

inline double barber_reference(const Eigen::MatrixXd& m, const nestkit::Partition& p) {
    const Eigen::Index nr = m.rows(), nc = m.cols();
    const double e = m.sum();
    Eigen::VectorXd rd = m.rowwise().sum(), cd = m.colwise().sum();
    int k = 0;
    for (int c : p.row_community) k = std::max(k, c + 1);
    for (int c : p.col_community) k = std::max(k, c + 1);
    double q = 0;
    for (int comm = 0; comm < k; ++comm) {
        double links = 0, dr = 0, dc = 0;
        for (Eigen::Index i = 0; i < nr; ++i) {
            if (p.row_community[static_cast<std::size_t>(i)] != comm) continue;
            dr += rd(i);
            for (Eigen::Index a = 0; a < nc; ++a)
                if (p.col_community[static_cast<std::size_t>(a)] == comm) links += m(i, a);
        }
        for (Eigen::Index a = 0; a < nc; ++a)
            if (p.col_community[static_cast<std::size_t>(a)] == comm) dc += cd(a);
        q += links - dr * dc / e;
    }
    return q / e;
}

}  // namespace testutil
