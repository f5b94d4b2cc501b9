#include "nestkit/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace nestkit {

int NodeRanking::rank_of(const std::string& id) const {
    for (std::size_t i = 0; i < order.size(); ++i)
        if (order[i] == id) return static_cast<int>(i) + 1;
    return -1;
}

NodeRanking build_ranking(NodeClass klass, RankMetric metric,
                          const std::vector<std::string>& ids,
                          const std::vector<double>& scores,
                          const std::vector<int>* tiebreak_degrees) {
    if (ids.size() != scores.size())
        throw std::invalid_argument("ranking ids and scores differ in length");
    std::vector<std::size_t> idx(ids.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        if (tiebreak_degrees && (*tiebreak_degrees)[a] != (*tiebreak_degrees)[b])
            return (*tiebreak_degrees)[a] > (*tiebreak_degrees)[b];
        return ids[a] < ids[b];
    });
    NodeRanking r;
    r.klass = klass;
    r.metric = metric;
    r.order.reserve(ids.size());
    for (std::size_t i : idx) r.order.push_back(ids[i]);
    for (std::size_t i = 0; i < ids.size(); ++i) r.scores.emplace(ids[i], scores[i]);
    return r;
}

NodeRanking degree_ranking(const BipartiteGraph& g, NodeClass klass) {
    const auto deg = degrees(g, klass);
    std::vector<double> scores(deg.begin(), deg.end());
    return build_ranking(klass, RankMetric::degree, g.ids(klass), scores);
}

void fitness_step(const Eigen::MatrixXd& occupancy, FitnessVariant variant,
                  Eigen::VectorXd& fitness, Eigen::VectorXd& complexity) {
    const Eigen::Index nr = occupancy.rows(), nc = occupancy.cols();
    Eigen::VectorXd f_new(nr), q_new(nc);
    f_new = occupancy * complexity;
    for (Eigen::Index c = 0; c < nc; ++c) {
        double denom = 0;
        for (Eigen::Index r = 0; r < nr; ++r) {
            if (occupancy(r, c) == 0.0) continue;
            denom += variant == FitnessVariant::harmonic ? 1.0 / fitness(r)
                                                         : 1.0 - fitness(r);
        }
        if (variant == FitnessVariant::complement && std::abs(denom) < 1e-12)
            throw std::runtime_error(
                "complement variant: vanishing denominator at column " + std::to_string(c));
        q_new(c) = 1.0 / denom;
    }
    fitness = f_new / f_new.mean();
    complexity = q_new / q_new.mean();
}

namespace {

std::vector<int> ordered_indices(const std::vector<double>& scores,
                                 const std::vector<int>& deg,
                                 const std::vector<std::string>& ids) {
    std::vector<int> idx(scores.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
        const auto ua = static_cast<std::size_t>(a), ub = static_cast<std::size_t>(b);
        if (scores[ua] != scores[ub]) return scores[ua] > scores[ub];
        if (deg[ua] != deg[ub]) return deg[ua] > deg[ub];
        return ids[ua] < ids[ub];
    });
    return idx;
}

}  // namespace

FitnessResult fitness_complexity(const BipartiteGraph& g, const FitnessOptions& opt) {
    const std::size_t nr = g.num_rows(), nc = g.num_cols();
    const auto row_deg = degrees(g, NodeClass::row);
    const auto col_deg = degrees(g, NodeClass::col);

    const double init = opt.variant == FitnessVariant::harmonic ? 1.0 : 0.5;
    std::vector<double> f(nr, init), q(nc, init), f_new(nr), q_new(nc);

    std::vector<int> last_row_order, last_col_order;
    int stable = 0;
    FitnessResult res;

    for (int it = 1; it <= opt.max_iterations; ++it) {
        for (std::size_t i = 0; i < nr; ++i) {
            double s = 0;
            for (const auto& [c, w] : g.row_neighbors(static_cast<int>(i))) {
                (void)w;
                s += q[static_cast<std::size_t>(c)];
            }
            f_new[i] = s;
        }
        for (std::size_t a = 0; a < nc; ++a) {
            double denom = 0;
            for (const auto& [r, w] : g.col_neighbors(static_cast<int>(a))) {
                (void)w;
                denom += opt.variant == FitnessVariant::harmonic
                             ? 1.0 / f[static_cast<std::size_t>(r)]
                             : 1.0 - f[static_cast<std::size_t>(r)];
            }
            if (opt.variant == FitnessVariant::complement && std::abs(denom) < 1e-12)
                throw std::runtime_error("complement variant: vanishing denominator at column " +
                                         g.col_ids()[a]);
            q_new[a] = 1.0 / denom;
        }
        const double fm = std::accumulate(f_new.begin(), f_new.end(), 0.0) / static_cast<double>(nr);
        const double qm = std::accumulate(q_new.begin(), q_new.end(), 0.0) / static_cast<double>(nc);
        if (!(std::isfinite(fm) && std::isfinite(qm)) || fm == 0.0 || qm == 0.0)
            throw std::runtime_error("fitness-complexity iteration degenerated at iteration " +
                                     std::to_string(it));
        double change = 0;
        for (std::size_t i = 0; i < nr; ++i) {
            f_new[i] /= fm;
            change = std::max(change, std::abs(f_new[i] - f[i]) / std::max(std::abs(f[i]), 1e-300));
        }
        for (std::size_t a = 0; a < nc; ++a) {
            q_new[a] /= qm;
            change = std::max(change, std::abs(q_new[a] - q[a]) / std::max(std::abs(q[a]), 1e-300));
        }
        f.swap(f_new);
        q.swap(q_new);
        res.iterations = it;

        if (change < opt.tol) {
            res.stopped_by_rank_stability = false;
            break;
        }
        auto row_order = ordered_indices(f, row_deg, g.row_ids());
        auto col_order = ordered_indices(q, col_deg, g.col_ids());
        if (row_order == last_row_order && col_order == last_col_order) {
            if (++stable >= opt.rank_stable_iterations) {
                res.stopped_by_rank_stability = true;
                break;
            }
        } else {
            stable = 0;
            last_row_order = std::move(row_order);
            last_col_order = std::move(col_order);
        }
        if (it == opt.max_iterations)
            throw std::runtime_error("fitness-complexity did not converge after " +
                                     std::to_string(opt.max_iterations) +
                                     " iterations (last max relative change " +
                                     std::to_string(change) + ")");
    }

    res.fitness = f;
    res.complexity = q;
    res.row_ranking = build_ranking(NodeClass::row, RankMetric::fitness, g.row_ids(), f, &row_deg);
    res.col_ranking =
        build_ranking(NodeClass::col, RankMetric::complexity, g.col_ids(), q, &col_deg);
    return res;
}

BetweennessResult betweenness(const BipartiteGraph& g) {
    const std::size_t nr = g.num_rows(), n = nr + g.num_cols();
    auto neighbors = [&](std::size_t v, auto&& visit) {
        if (v < nr) {
            for (const auto& [c, w] : g.row_neighbors(static_cast<int>(v))) {
                (void)w;
                visit(nr + static_cast<std::size_t>(c));
            }
        } else {
            for (const auto& [r, w] : g.col_neighbors(static_cast<int>(v - nr))) {
                (void)w;
                visit(static_cast<std::size_t>(r));
            }
        }
    };

    std::vector<double> bc(n, 0.0);
    std::vector<int> dist(n);
    std::vector<double> sigma(n), delta(n);
    std::vector<std::vector<std::size_t>> pred(n);
    std::vector<std::size_t> stack, queue;

    for (std::size_t s = 0; s < n; ++s) {
        std::fill(dist.begin(), dist.end(), -1);
        std::fill(sigma.begin(), sigma.end(), 0.0);
        std::fill(delta.begin(), delta.end(), 0.0);
        for (auto& p : pred) p.clear();
        stack.clear();
        queue.clear();

        dist[s] = 0;
        sigma[s] = 1;
        queue.push_back(s);
        std::size_t head = 0;
        while (head < queue.size()) {
            const std::size_t v = queue[head++];
            stack.push_back(v);
            neighbors(v, [&](std::size_t u) {
                if (dist[u] < 0) {
                    dist[u] = dist[v] + 1;
                    queue.push_back(u);
                }
                if (dist[u] == dist[v] + 1) {
                    sigma[u] += sigma[v];
                    pred[u].push_back(v);
                }
            });
        }
        for (std::size_t i = stack.size(); i-- > 0;) {
            const std::size_t w = stack[i];
            for (std::size_t v : pred[w]) delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
            if (w != s) bc[w] += delta[w];
        }
    }
    for (auto& x : bc) x /= 2.0;  // unordered pairs

    std::vector<double> row_scores(bc.begin(), bc.begin() + static_cast<std::ptrdiff_t>(nr));
    std::vector<double> col_scores(bc.begin() + static_cast<std::ptrdiff_t>(nr), bc.end());
    BetweennessResult res;
    res.rows = build_ranking(NodeClass::row, RankMetric::betweenness, g.row_ids(), row_scores);
    res.cols = build_ranking(NodeClass::col, RankMetric::betweenness, g.col_ids(), col_scores);
    return res;
}

namespace {

std::vector<int> permutation_for(const BipartiteGraph& g, const NodeRanking& ranking,
                                 NodeClass klass) {
    const auto& ids = g.ids(klass);
    if (ranking.klass != klass)
        throw std::invalid_argument("ranking covers the wrong node class");
    if (ranking.order.size() != ids.size())
        throw std::invalid_argument("ranking does not cover the graph's node set");
    std::vector<int> perm;
    perm.reserve(ids.size());
    std::vector<char> seen(ids.size(), 0);
    for (const auto& id : ranking.order) {
        const int idx = klass == NodeClass::row ? g.row_index(id) : g.col_index(id);
        if (idx < 0 || seen[static_cast<std::size_t>(idx)])
            throw std::invalid_argument("ranking does not match the graph's node set: " + id);
        seen[static_cast<std::size_t>(idx)] = 1;
        perm.push_back(idx);
    }
    return perm;
}

}  // namespace

OrderedMatrix ordered_matrix(const BipartiteGraph& g, const NodeRanking& rows,
                             const NodeRanking& cols) {
    const auto row_perm = permutation_for(g, rows, NodeClass::row);
    const auto col_perm = permutation_for(g, cols, NodeClass::col);

    OrderedMatrix m;
    m.row_order = rows.order;
    m.col_order = cols.order;
    m.occupancy.resize(g.num_rows(), g.num_cols());
    std::vector<int> col_pos(g.num_cols());
    for (std::size_t j = 0; j < col_perm.size(); ++j)
        col_pos[static_cast<std::size_t>(col_perm[j])] = static_cast<int>(j);
    for (std::size_t i = 0; i < row_perm.size(); ++i) {
        for (const auto& [c, w] : g.row_neighbors(row_perm[i])) {
            (void)w;
            m.occupancy.set(i, static_cast<std::size_t>(col_pos[static_cast<std::size_t>(c)]));
        }
        m.row_degrees.push_back(
            static_cast<int>(g.row_neighbors(row_perm[i]).size()));
    }
    for (int c : col_perm)
        m.col_degrees.push_back(static_cast<int>(g.col_neighbors(c).size()));
    return m;
}

RankingComparison compare_rankings(const NodeRanking& baseline, const NodeRanking& other,
                                   int outlier_threshold) {
    if (baseline.klass != other.klass)
        throw std::invalid_argument("rankings cover different node classes");
    if (baseline.order.size() != other.order.size())
        throw std::invalid_argument("rankings cover different node sets");
    std::unordered_map<std::string, int> base_rank;
    for (std::size_t i = 0; i < baseline.order.size(); ++i)
        base_rank.emplace(baseline.order[i], static_cast<int>(i) + 1);

    RankingComparison cmp;
    cmp.outlier_threshold = outlier_threshold;
    double d2 = 0;
    for (std::size_t i = 0; i < other.order.size(); ++i) {
        const auto& id = other.order[i];
        auto it = base_rank.find(id);
        if (it == base_rank.end())
            throw std::invalid_argument("rankings cover different node sets: " + id);
        RankShift s;
        s.id = id;
        s.rank_other = static_cast<int>(i) + 1;
        s.rank_baseline = it->second;
        s.delta = s.rank_baseline - s.rank_other;
        s.outlier = std::abs(s.delta) >= outlier_threshold;
        d2 += static_cast<double>(s.delta) * static_cast<double>(s.delta);
        cmp.shifts.push_back(std::move(s));
    }
    const double n = static_cast<double>(other.order.size());
    cmp.spearman = n < 2 ? 1.0 : 1.0 - 6.0 * d2 / (n * (n * n - 1.0));
    return cmp;
}

}  // namespace nestkit
