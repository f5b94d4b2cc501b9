#pragma once

// Node importance rankings.
//
// fitness_complexity runs the coupled Jacobi iteration where a row's score
// sums its partners' scores and a partner's score penalises reachability by
// low-score rows. Two aggregation variants are supported for the column
// update: harmonic (reciprocal of summed reciprocals) and complement
// (reciprocal of summed 1 - f). Scores are mean-normalised each iteration;
// low-degree scores may decay towards zero, which is expected and handled
// by the rank-stability stop rule.
//
// betweenness is exact Brandes over the bipartite graph viewed as an
// ordinary undirected graph; counts are unordered source/target pairs with
// endpoints excluded, unnormalised.

#include "nestkit/bipartite_graph.hpp"

#include <Eigen/Dense>

#include <string>
#include <unordered_map>
#include <vector>

namespace nestkit {

enum class RankMetric { degree, fitness, complexity, betweenness, pagerank };

struct NodeRanking {
    NodeClass klass = NodeClass::row;
    RankMetric metric = RankMetric::degree;
    std::vector<std::string> order;  // best first
    std::unordered_map<std::string, double> scores;

    // 1-based position, -1 when absent.
    int rank_of(const std::string& id) const;
};

// Sorts by score descending; ties fall back to degree descending when
// given, then ascending node id.
NodeRanking build_ranking(NodeClass klass, RankMetric metric,
                          const std::vector<std::string>& ids,
                          const std::vector<double>& scores,
                          const std::vector<int>* tiebreak_degrees = nullptr);

NodeRanking degree_ranking(const BipartiteGraph& g, NodeClass klass);

enum class FitnessVariant { harmonic, complement };

struct FitnessOptions {
    FitnessVariant variant = FitnessVariant::harmonic;
    double tol = 1e-10;              // max relative score change
    int rank_stable_iterations = 50;
    int max_iterations = 10000;
};

struct FitnessResult {
    std::vector<double> fitness;     // rows, mean 1
    std::vector<double> complexity;  // cols, mean 1
    int iterations = 0;
    bool stopped_by_rank_stability = false;
    NodeRanking row_ranking, col_ranking;
};

FitnessResult fitness_complexity(const BipartiteGraph& g, const FitnessOptions& opt = {});

// One Jacobi update on a dense 0/1 matrix, including the mean
// normalisation. Exposed so the iteration can be followed step by step.
void fitness_step(const Eigen::MatrixXd& occupancy, FitnessVariant variant,
                  Eigen::VectorXd& fitness, Eigen::VectorXd& complexity);

struct BetweennessResult {
    NodeRanking rows, cols;
};

BetweennessResult betweenness(const BipartiteGraph& g);

// Occupancy reordered by per-class rankings; the degree sequences follow
// the new order. Rankings must cover the graph's node sets exactly.
struct OrderedMatrix {
    std::vector<std::string> row_order, col_order;
    BitMatrix occupancy;
    std::vector<int> row_degrees, col_degrees;
};

OrderedMatrix ordered_matrix(const BipartiteGraph& g, const NodeRanking& rows,
                             const NodeRanking& cols);

struct RankShift {
    std::string id;
    int rank_baseline = 0;
    int rank_other = 0;
    int delta = 0;       // baseline - other; positive means the node climbed
    bool outlier = false;
};

struct RankingComparison {
    std::vector<RankShift> shifts;  // in `other` ranking order
    double spearman = 1.0;
    int outlier_threshold = 10;
};

// Both rankings must cover the same node class and the same node set.
RankingComparison compare_rankings(const NodeRanking& baseline, const NodeRanking& other,
                                   int outlier_threshold = 10);

}  // namespace nestkit
