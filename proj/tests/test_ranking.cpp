#include "doctest.h"

#include "helpers.hpp"
#include "nestkit/ranking.hpp"

#include <algorithm>
#include <cmath>

using namespace nestkit;
using testutil::unweighted;

namespace {

// Independent betweenness oracle: for every unordered pair, count the
// shortest paths through each interior node from two BFS sweeps. A node v
// lies on an s-t geodesic iff dist_s(v) + dist_t(v) == dist_s(t), and
// carries sigma_s(v) * sigma_t(v) of the sigma_s(t) paths.
struct BfsSweep {
    std::vector<int> dist;
    std::vector<double> sigma;
};

BfsSweep sweep(const BipartiteGraph& g, std::size_t source) {
    const std::size_t nr = g.num_rows(), n = nr + g.num_cols();
    BfsSweep out{std::vector<int>(n, -1), std::vector<double>(n, 0.0)};
    out.dist[source] = 0;
    out.sigma[source] = 1;
    std::vector<std::size_t> queue{source};
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const std::size_t v = queue[head];
        auto visit = [&](std::size_t u) {
            if (out.dist[u] < 0) {
                out.dist[u] = out.dist[v] + 1;
                queue.push_back(u);
            }
            if (out.dist[u] == out.dist[v] + 1) out.sigma[u] += out.sigma[v];
        };
        if (v < nr)
            for (const auto& [c, w] : g.row_neighbors(static_cast<int>(v))) {
                (void)w;
                visit(nr + static_cast<std::size_t>(c));
            }
        else
            for (const auto& [r, w] : g.col_neighbors(static_cast<int>(v - nr))) {
                (void)w;
                visit(static_cast<std::size_t>(r));
            }
    }
    return out;
}

std::vector<double> betweenness_oracle(const BipartiteGraph& g) {
    const std::size_t n = g.num_rows() + g.num_cols();
    std::vector<BfsSweep> sweeps;
    for (std::size_t v = 0; v < n; ++v) sweeps.push_back(sweep(g, v));
    std::vector<double> bc(n, 0.0);
    for (std::size_t s = 0; s < n; ++s) {
        for (std::size_t t = s + 1; t < n; ++t) {
            const double total = sweeps[s].sigma[t];
            if (sweeps[s].dist[t] < 0 || total == 0) continue;
            for (std::size_t v = 0; v < n; ++v) {
                if (v == s || v == t) continue;
                if (sweeps[s].dist[v] < 0 || sweeps[t].dist[v] < 0) continue;
                if (sweeps[s].dist[v] + sweeps[t].dist[v] != sweeps[s].dist[t]) continue;
                bc[v] += sweeps[s].sigma[v] * sweeps[t].sigma[v] / total;
            }
        }
    }
    return bc;
}

}  // namespace

TEST_SUITE_BEGIN("ranking");

TEST_CASE("build_ranking orders by score, degree, then id") {
    std::vector<std::string> ids{"a", "b", "c"};
    std::vector<double> scores{2.0, 2.0, 3.0};

    auto by_id = build_ranking(NodeClass::row, RankMetric::degree, ids, scores);
    CHECK(by_id.order == std::vector<std::string>{"c", "a", "b"});
    CHECK(by_id.rank_of("c") == 1);
    CHECK(by_id.rank_of("b") == 3);
    CHECK(by_id.rank_of("ghost") == -1);

    std::vector<int> deg{1, 5, 0};
    auto by_degree = build_ranking(NodeClass::row, RankMetric::degree, ids, scores, &deg);
    CHECK(by_degree.order == std::vector<std::string>{"c", "b", "a"});

    CHECK_THROWS(build_ranking(NodeClass::row, RankMetric::degree, ids, {1.0}));
}

TEST_CASE("degree ranking of a small fixture") {
    auto g = unweighted({{"a", "x"}, {"a", "y"}, {"b", "x"}, {"c", "x"}, {"c", "y"}});
    auto rows = degree_ranking(g, NodeClass::row);
    CHECK(rows.order == std::vector<std::string>{"a", "c", "b"});
    CHECK(rows.scores.at("b") == 1.0);
    auto cols = degree_ranking(g, NodeClass::col);
    CHECK(cols.order == std::vector<std::string>{"x", "y"});
}

TEST_CASE("one harmonic step on the 2x2 wedge, by hand") {
    Eigen::MatrixXd m(2, 2);
    m << 1, 1, 1, 0;
    Eigen::VectorXd f = Eigen::VectorXd::Ones(2), q = Eigen::VectorXd::Ones(2);
    fitness_step(m, FitnessVariant::harmonic, f, q);

    // row sums (2, 1), mean 1.5; the column update sees the previous
    // fitness (1, 1): denominators (2, 1) give (0.5, 1), mean 0.75
    CHECK(f(0) == 4.0 / 3.0);
    CHECK(f(1) == 2.0 / 3.0);
    CHECK(q(0) == 2.0 / 3.0);
    CHECK(q(1) == 4.0 / 3.0);
}

TEST_CASE("one complement step on the 2x2 wedge, by hand") {
    Eigen::MatrixXd m(2, 2);
    m << 1, 1, 1, 0;
    Eigen::VectorXd f = Eigen::VectorXd::Constant(2, 0.5);
    Eigen::VectorXd q = Eigen::VectorXd::Constant(2, 0.5);
    fitness_step(m, FitnessVariant::complement, f, q);

    // row sums (1, 0.5), mean 0.75; column denominators 2 - f_a - f_b = 1
    // and 1 - f_a = 0.5 give (1, 2), mean 1.5
    CHECK(f(0) == 4.0 / 3.0);
    CHECK(f(1) == 2.0 / 3.0);
    CHECK(q(0) == 2.0 / 3.0);
    CHECK(q(1) == 4.0 / 3.0);
}

TEST_CASE("converged fitness follows degree on nested graphs") {
    nestkit::Rng rng(13);
    for (int trial = 0; trial < 5; ++trial) {
        const int n = 4 + 2 * trial;
        // staircase rows in shuffled insertion order so registry order
        // cannot masquerade as the ranking
        std::vector<int> rows(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) rows[static_cast<std::size_t>(i)] = i;
        rng.shuffle(rows);
        std::vector<EdgeRecord> edges;
        for (int i : rows)
            for (int j = 0; j < n - i; ++j)
                edges.push_back({"as" + std::to_string(i), "ix" + std::to_string(j), 1.0});
        auto g = BipartiteGraph::build(edges);

        auto res = fitness_complexity(g);
        CHECK(res.iterations > 0);
        CHECK(res.row_ranking.order == degree_ranking(g, NodeClass::row).order);
        // columns rank by complexity: the rarest column (touched only by
        // the fittest row) comes first, so the degree order is reversed
        auto col_degree = degree_ranking(g, NodeClass::col).order;
        std::reverse(col_degree.begin(), col_degree.end());
        CHECK(res.col_ranking.order == col_degree);
    }
}

TEST_CASE("complete graphs stay uniform under the harmonic map") {
    auto g = graph_from_dense(Eigen::MatrixXd::Ones(3, 4));
    auto res = fitness_complexity(g);
    for (double v : res.fitness) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
    for (double v : res.complexity) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_FALSE(res.stopped_by_rank_stability);
}

TEST_CASE("complement variant dies on saturated columns") {
    // K22 drives every fitness to 1, so 1 - f sums to zero
    auto g = unweighted({{"a", "x"}, {"a", "y"}, {"b", "x"}, {"b", "y"}});
    FitnessOptions opt;
    opt.variant = FitnessVariant::complement;
    CHECK_THROWS_WITH(fitness_complexity(g, opt),
                      "complement variant: vanishing denominator at column x");
}

TEST_CASE("betweenness hand values") {
    // path r1 - c - r2: the middle column carries the single r1/r2 pair
    auto path = unweighted({{"r1", "c"}, {"r2", "c"}});
    auto b = betweenness(path);
    CHECK(b.cols.scores.at("c") == 1.0);
    CHECK(b.rows.scores.at("r1") == 0.0);
    CHECK(b.rows.scores.at("r2") == 0.0);

    // a hub row between four columns: C(4,2) pairs route through it
    auto star = unweighted({{"hub", "c1"}, {"hub", "c2"}, {"hub", "c3"}, {"hub", "c4"}});
    auto s = betweenness(star);
    CHECK(s.rows.scores.at("hub") == 6.0);
    for (const auto& id : s.cols.order) CHECK(s.cols.scores.at(id) == 0.0);
}

TEST_CASE("betweenness matches the pairwise oracle") {
    nestkit::Rng rng(29);
    for (int trial = 0; trial < 10; ++trial) {
        auto g = largest_connected_component(
            graph_from_dense(testutil::random_filled(6, 7, 0.3, rng)));
        auto expect = betweenness_oracle(g);
        auto got = betweenness(g);
        for (std::size_t r = 0; r < g.num_rows(); ++r)
            CHECK(got.rows.scores.at(g.row_ids()[r]) ==
                  doctest::Approx(expect[r]).epsilon(1e-10));
        for (std::size_t c = 0; c < g.num_cols(); ++c)
            CHECK(got.cols.scores.at(g.col_ids()[c]) ==
                  doctest::Approx(expect[g.num_rows() + c]).epsilon(1e-10));
    }
}

TEST_CASE("ordered matrix permutes the occupancy consistently") {
    auto g = unweighted({{"a", "x"}, {"a", "y"}, {"b", "x"}, {"c", "y"}, {"c", "z"}, {"a", "z"}});
    auto m = ordered_matrix(g, degree_ranking(g, NodeClass::row),
                            degree_ranking(g, NodeClass::col));
    REQUIRE(m.row_order.size() == 3);
    REQUIRE(m.col_order.size() == 3);
    CHECK(m.row_order[0] == "a");  // degree 3 first
    for (std::size_t i = 0; i < m.row_order.size(); ++i) {
        int deg = 0;
        for (std::size_t j = 0; j < m.col_order.size(); ++j) {
            const bool bit = m.occupancy.test(i, j);
            const bool edge = g.has_edge(g.row_index(m.row_order[i]),
                                         g.col_index(m.col_order[j]));
            CHECK(bit == edge);
            deg += bit;
        }
        CHECK(deg == m.row_degrees[i]);
    }
    // ordering by degree puts the staircase boundary monotone
    CHECK(std::is_sorted(m.row_degrees.rbegin(), m.row_degrees.rend()));
    CHECK(std::is_sorted(m.col_degrees.rbegin(), m.col_degrees.rend()));

    auto wrong_class = degree_ranking(g, NodeClass::col);
    CHECK_THROWS(ordered_matrix(g, wrong_class, wrong_class));
    auto other = unweighted({{"a", "x"}, {"b", "x"}});
    CHECK_THROWS(ordered_matrix(g, degree_ranking(other, NodeClass::row),
                                degree_ranking(g, NodeClass::col)));
}

TEST_CASE("ranking comparison: identity, reversal, and outliers") {
    std::vector<std::string> ids{"a", "b", "c", "d", "e"};
    std::vector<double> up{5, 4, 3, 2, 1}, down{1, 2, 3, 4, 5};
    auto base = build_ranking(NodeClass::row, RankMetric::degree, ids, up);
    auto rev = build_ranking(NodeClass::row, RankMetric::fitness, ids, down);

    auto same = compare_rankings(base, base);
    CHECK(same.spearman == 1.0);
    for (const auto& s : same.shifts) {
        CHECK(s.delta == 0);
        CHECK_FALSE(s.outlier);
    }

    auto flipped = compare_rankings(base, rev, 4);
    CHECK(flipped.spearman == -1.0);
    // "a" was first, now last: it dropped four places
    CHECK(flipped.shifts.back().id == "a");
    CHECK(flipped.shifts.back().delta == -4);
    CHECK(flipped.shifts.back().outlier);
    // "e" climbed from last to first
    CHECK(flipped.shifts.front().id == "e");
    CHECK(flipped.shifts.front().delta == 4);

    auto smaller = build_ranking(NodeClass::row, RankMetric::degree, {"a"}, {1.0});
    CHECK_THROWS(compare_rankings(base, smaller));
}

TEST_SUITE_END();
