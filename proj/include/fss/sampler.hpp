#pragma once

#include <Eigen/Core>
#include <optional>
#include <utility>
#include <vector>

#include "fss/metric.hpp"

namespace fss {

/// Ordered farthest-point sample. Column l of X holds the shortest-path
/// distances of every face to face indices[l]; betas[l] is the max-min
/// residual after the first l+1 columns, non-increasing with beta_{n-1} = 0
/// when the sample is complete.
struct FarthestSample {
    std::vector<int> indices;
    Eigen::MatrixXd X;
    std::vector<double> betas;

    int k() const { return static_cast<int>(indices.size()); }
    int n() const { return static_cast<int>(X.rows()); }
};

/// Choice of the first sample face: an explicit index, or a seeded draw.
struct FirstFace {
    std::optional<int> index;
    std::uint64_t seed = 0;

    static FirstFace at(int i) { return FirstFace{i, 0}; }
    static FirstFace random(std::uint64_t seed) { return FirstFace{std::nullopt, seed}; }
};

/// Greedy max-min sample of fixed size k. Each step selects the face
/// maximizing the minimal distance to the already selected faces, ties broken
/// by the smallest face index. Performs exactly k sssp calls.
FarthestSample sample_fixed_k(const DualGraph& graph, int k, const FirstFace& first);

/// Same greedy procedure, stopped at the smallest k >= 2 with
/// beta_k/beta_1 < epsilon (or k = n when the threshold is never reached).
/// Identical element-wise to sample_fixed_k(k) for the same first face.
FarthestSample sample_epsilon(const DualGraph& graph, double epsilon, const FirstFace& first);

/// Pairs (l, beta_l/beta_1) for l = 1..k; the first value is 1 by
/// construction.
std::vector<std::pair<int, double>> beta_curve(const FarthestSample& sample);

/// Heuristic sample-size suggestion: the first l >= 2 where the normalized
/// slope (beta_{l-1} - beta_l)/beta_1 drops below the threshold. Reported to
/// users next to the curve, never applied automatically.
std::optional<int> beta_knee(const FarthestSample& sample, double slope_threshold = 1e-3);

void write_beta_csv(const FarthestSample& sample, const std::string& path);
void write_indices(const FarthestSample& sample, const std::string& path);

}  // namespace fss
