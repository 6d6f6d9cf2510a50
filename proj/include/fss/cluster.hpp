#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fss/affinity.hpp"
#include "fss/sdf.hpp"

namespace fss {

/// Length-n cluster assignment with labels in 1..n_c.
struct Segmentation {
    std::vector<int> labels;
    int n_c = 0;
    double inertia = 0.0;  // sum of within-cluster cosine distances

    int n() const { return static_cast<int>(labels.size()); }
};

/// Optional per-run diagnostics for tests.
struct KMeansDiag {
    std::vector<double> inertia_trace;  // winning replicate, one entry per Lloyd iteration
    int iterations = 0;
    int best_replicate = 0;
};

/// k-means++ under cosine distance on row-normalized points. Runs
/// `replicates` independent seedings (concurrently; result selection is by
/// best inertia, ties by lowest replicate index), Lloyd iteration to an
/// assignment fixpoint or max_iter, centroids renormalized each update.
/// Empty clusters are reseeded with the point farthest from their stale
/// centroid. Deterministic given (points, n_c, seed, replicates).
Segmentation kmeans_cosine(const Eigen::MatrixXd& points, int n_c, std::uint64_t seed,
                           int replicates = 10, int max_iter = 100, KMeansDiag* diag = nullptr);

/// How the sample size is chosen.
struct SamplingSpec {
    enum class Mode { fraction, fixed_k, epsilon } mode = Mode::fraction;
    double fraction = 0.1;   // k = max(2, floor(fraction*n)), capped at n
    int k = 0;
    double epsilon = 0.05;

    static SamplingSpec frac(double f) { return {Mode::fraction, f, 0, 0.0}; }
    static SamplingSpec fixed(int k) { return {Mode::fixed_k, 0.0, k, 0.0}; }
    static SamplingSpec eps(double e) { return {Mode::epsilon, 0.0, 0, e}; }
};

struct SegmentOptions {
    int n_c = 2;
    SamplingSpec sampling;
    std::uint64_t sample_seed = 0;
    std::optional<int> first_face;
    std::uint64_t kmeans_seed = 0;
    int replicates = 10;
    int max_iter = 100;
    KernelForm kernel = KernelForm::distance;
};

struct SegmentResult {
    Segmentation seg;
    int k = 0;
    int j1 = 0;
    double sigma_k = 0.0;
    double beta_1 = 0.0;
    double beta_k = 0.0;
    std::uint64_t sssp_calls = 0;
};

/// The full pipeline on a prebuilt dual graph: farthest sample -> kernel ->
/// row normalization -> cosine k-means.
SegmentResult segment_graph(const DualGraph& graph, const SegmentOptions& opts);

/// Convenience wrapper that derives geometry and the dual graph from a mesh.
/// sdf_values must be provided iff the metric is sdf.
SegmentResult segment(const TriMesh& mesh, const MetricSpec& metric, const SegmentOptions& opts,
                      const std::vector<double>* sdf_values = nullptr);

int sample_size_for(const SamplingSpec& spec, int n);

/// Plain text, one integer label per line, face order = mesh order (the same
/// layout the benchmark ground-truth files use).
void write_labels(const std::vector<int>& labels, const std::string& path);
std::vector<int> read_labels(const std::string& path);

}  // namespace fss
