#include "fss/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "fss/common.hpp"

namespace fss {

namespace {

struct ReplicateResult {
    std::vector<int> assign;     // 0-based cluster per point
    double inertia = std::numeric_limits<double>::infinity();
    std::vector<double> trace;
    int iterations = 0;
    bool valid = false;
};

// Cosine distance between unit vectors is 1 - dot; assignments maximize the
// dot product, ties going to the lowest centroid index.
int nearest_centroid(const Eigen::MatrixXd& points, int i, const Eigen::MatrixXd& centroids) {
    int best = 0;
    double best_dot = -std::numeric_limits<double>::infinity();
    for (int c = 0; c < centroids.cols(); ++c) {
        const double d = points.row(i).dot(centroids.col(c).transpose());
        if (d > best_dot) {
            best_dot = d;
            best = c;
        }
    }
    return best;
}

Eigen::MatrixXd kmeanspp_seed(const Eigen::MatrixXd& points, int n_c, std::mt19937_64& rng) {
    const int n = static_cast<int>(points.rows());
    const int dim = static_cast<int>(points.cols());
    Eigen::MatrixXd centroids(dim, n_c);
    std::vector<char> is_center(n, 0);
    std::vector<double> dist(n, 0.0);

    int first = static_cast<int>(bounded_index(rng, static_cast<std::size_t>(n)));
    centroids.col(0) = points.row(first).transpose();
    is_center[first] = 1;
    for (int i = 0; i < n; ++i) dist[i] = 1.0 - points.row(i).dot(centroids.col(0).transpose());

    for (int c = 1; c < n_c; ++c) {
        // D^2 weighting with the cosine distance as D.
        double total = 0.0;
        for (int i = 0; i < n; ++i) {
            const double d = std::max(dist[i], 0.0);
            total += d * d;
        }
        int chosen = -1;
        if (total > 0.0) {
            const double u = unit_double(rng) * total;
            double run = 0.0;
            for (int i = 0; i < n; ++i) {
                const double d = std::max(dist[i], 0.0);
                run += d * d;
                if (run > u && !is_center[i]) {
                    chosen = i;
                    break;
                }
            }
            if (chosen < 0) {  // fell off the end through rounding; take the last candidate
                for (int i = n - 1; i >= 0; --i)
                    if (!is_center[i] && dist[i] > 0.0) {
                        chosen = i;
                        break;
                    }
            }
        }
        if (chosen < 0) {
            // all remaining points coincide with existing centers
            for (int i = 0; i < n; ++i)
                if (!is_center[i]) {
                    chosen = i;
                    break;
                }
        }
        if (chosen < 0) fail("cluster: could not seed " + std::to_string(n_c) + " centers");
        centroids.col(c) = points.row(chosen).transpose();
        is_center[chosen] = 1;
        for (int i = 0; i < n; ++i)
            dist[i] = std::min(dist[i], 1.0 - points.row(i).dot(centroids.col(c).transpose()));
    }
    return centroids;
}

ReplicateResult run_replicate(const Eigen::MatrixXd& points, int n_c, std::uint64_t seed,
                              int max_iter) {
    const int n = static_cast<int>(points.rows());
    std::mt19937_64 rng(seed);
    Eigen::MatrixXd centroids = kmeanspp_seed(points, n_c, rng);

    ReplicateResult res;
    res.assign.assign(n, -1);
    std::vector<int> counts(n_c, 0);
    for (int iter = 0; iter < max_iter; ++iter) {
        bool changed = false;
        double inertia = 0.0;
        std::fill(counts.begin(), counts.end(), 0);
        for (int i = 0; i < n; ++i) {
            const int c = nearest_centroid(points, i, centroids);
            inertia += 1.0 - points.row(i).dot(centroids.col(c).transpose());
            if (c != res.assign[i]) {
                res.assign[i] = c;
                changed = true;
            }
            ++counts[c];
        }
        res.trace.push_back(inertia);
        res.inertia = inertia;
        res.iterations = iter + 1;
        if (!changed) break;

        Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(points.cols(), n_c);
        for (int i = 0; i < n; ++i) sums.col(res.assign[i]) += points.row(i).transpose();
        std::vector<char> reseeded_point(n, 0);
        for (int c = 0; c < n_c; ++c) {
            if (counts[c] > 0) {
                const double norm = sums.col(c).norm();
                if (norm > 0.0) centroids.col(c) = sums.col(c) / norm;
                // a zero mean leaves the previous centroid in place
            } else {
                // reseed with the point farthest (cosine) from the stale centroid
                int far = -1;
                double far_d = -1.0;
                for (int i = 0; i < n; ++i) {
                    if (reseeded_point[i]) continue;
                    const double d = 1.0 - points.row(i).dot(centroids.col(c).transpose());
                    if (d > far_d) {
                        far_d = d;
                        far = i;
                    }
                }
                centroids.col(c) = points.row(far).transpose();
                reseeded_point[far] = 1;
            }
        }
    }
    res.valid = std::find(counts.begin(), counts.end(), 0) == counts.end();
    return res;
}

}  // namespace

Segmentation kmeans_cosine(const Eigen::MatrixXd& points, int n_c, std::uint64_t seed,
                           int replicates, int max_iter, KMeansDiag* diag) {
    const int n = static_cast<int>(points.rows());
    if (n == 0) fail("cluster: no points");
    if (n_c < 1 || n_c > n)
        fail("cluster: n_c = " + std::to_string(n_c) + " out of range [1," + std::to_string(n) + "]");
    if (replicates < 1) fail("cluster: replicates must be >= 1");
    for (int i = 0; i < n; ++i)
        if (std::abs(points.row(i).norm() - 1.0) > 1e-9)
            fail("cluster: row " + std::to_string(i) + " is not unit length");
    if (n_c > 1) {
        bool all_same = true;
        for (int i = 1; i < n && all_same; ++i)
            all_same = (points.row(i).array() == points.row(0).array()).all();
        if (all_same) fail("cluster: all rows identical; cannot split into " +
                           std::to_string(n_c) + " clusters");
    }

    Segmentation out;
    out.n_c = n_c;
    if (n_c == 1) {
        out.labels.assign(n, 1);
        double inertia = 0.0;
        Eigen::VectorXd mean = points.colwise().sum().transpose();
        const double norm = mean.norm();
        if (norm > 0.0) mean /= norm;
        for (int i = 0; i < n; ++i) inertia += 1.0 - points.row(i).dot(mean.transpose());
        out.inertia = inertia;
        if (diag) *diag = KMeansDiag{{inertia}, 1, 0};
        return out;
    }

    std::vector<ReplicateResult> results(replicates);
    parallel_for(0, replicates, [&](std::int64_t r) {
        results[r] = run_replicate(points, n_c, mix_seed(seed, 0x6b6d6531ULL + r), max_iter);
    });

    int best = -1;
    for (int r = 0; r < replicates; ++r) {
        if (!results[r].valid) continue;
        if (best < 0 || results[r].inertia < results[best].inertia) best = r;
    }
    if (best < 0)
        fail("cluster: empty cluster could not be repaired in any replicate (degenerate data)");

    const ReplicateResult& win = results[best];
    out.labels.resize(n);
    for (int i = 0; i < n; ++i) out.labels[i] = win.assign[i] + 1;
    out.inertia = win.inertia;
    if (diag) *diag = KMeansDiag{win.trace, win.iterations, best};
    return out;
}

int sample_size_for(const SamplingSpec& spec, int n) {
    switch (spec.mode) {
        case SamplingSpec::Mode::fraction: {
            if (!(spec.fraction > 0.0 && spec.fraction <= 1.0))
                fail("cluster: sample fraction must be in (0,1]");
            int k = static_cast<int>(spec.fraction * n);
            k = std::max(k, 2);
            return std::min(k, n);
        }
        case SamplingSpec::Mode::fixed_k:
            if (spec.k < 1 || spec.k > n)
                fail("cluster: k = " + std::to_string(spec.k) + " out of range [1," +
                     std::to_string(n) + "]");
            return spec.k;
        case SamplingSpec::Mode::epsilon:
            return 0;  // decided by the beta stopping rule
    }
    return 0;
}

SegmentResult segment_graph(const DualGraph& graph, const SegmentOptions& opts) {
    const FirstFace first = opts.first_face ? FirstFace::at(*opts.first_face)
                                            : FirstFace::random(opts.sample_seed);
    FarthestSample sample;
    if (opts.sampling.mode == SamplingSpec::Mode::epsilon) {
        sample = sample_epsilon(graph, opts.sampling.epsilon, first);
    } else {
        sample = sample_fixed_k(graph, sample_size_for(opts.sampling, graph.n()), first);
    }

    SegmentResult res;
    res.k = sample.k();
    res.j1 = sample.indices.front();
    res.beta_1 = sample.betas.front();
    res.beta_k = sample.betas.back();

    AffinitySample aff = build_wk(std::move(sample), opts.kernel);
    res.sigma_k = aff.sigma_k;
    normalize_rows(aff);
    res.seg = kmeans_cosine(aff.Wk, opts.n_c, opts.kmeans_seed, opts.replicates, opts.max_iter);
    res.sssp_calls = graph.sssp_calls();
    return res;
}

SegmentResult segment(const TriMesh& mesh, const MetricSpec& metric, const SegmentOptions& opts,
                      const std::vector<double>* sdf_values) {
    const FaceGeometry geom = face_geometry(mesh);
    const DualGraph graph = build_dual_graph(mesh, geom, metric, sdf_values);
    return segment_graph(graph, opts);
}

void write_labels(const std::vector<int>& labels, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail("cluster: cannot write " + path);
    for (int l : labels) out << l << "\n";
    if (!out) fail("cluster: write to " + path + " failed");
}

std::vector<int> read_labels(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cluster: cannot open " + path);
    std::vector<int> labels;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok)) continue;  // blank line
        try {
            std::size_t used = 0;
            const long v = std::stol(tok, &used);
            if (used != tok.size()) throw std::invalid_argument(tok);
            labels.push_back(static_cast<int>(v));
        } catch (const std::exception&) {
            fail("cluster: " + path + ":" + std::to_string(line_no) + ": not an integer label: '" +
                 tok + "'");
        }
    }
    return labels;
}

}  // namespace fss
