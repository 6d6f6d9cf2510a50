#include "fss/sampler.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "fss/common.hpp"

namespace fss {

namespace {

int pick_first(const DualGraph& graph, const FirstFace& first) {
    if (first.index) {
        if (*first.index < 0 || *first.index >= graph.n())
            fail("sampler: first face " + std::to_string(*first.index) + " out of range");
        return *first.index;
    }
    std::mt19937_64 rng(mix_seed(first.seed, 0x66737331ULL));
    return static_cast<int>(bounded_index(rng, static_cast<std::size_t>(graph.n())));
}

// Greedy max-min loop shared by both stopping rules. stop(l, betas) is
// consulted after column l (1-based) has been added; returning true truncates
// the sample at size l.
template <typename Stop>
FarthestSample greedy_sample(const DualGraph& graph, int k_max, const FirstFace& first,
                             Stop&& stop) {
    const int n = graph.n();
    FarthestSample s;
    s.X.resize(n, k_max);
    s.indices.reserve(k_max);
    s.betas.reserve(k_max);

    std::vector<double> min_dist(n, std::numeric_limits<double>::infinity());
    int next = pick_first(graph, first);
    int k = k_max;
    for (int l = 0; l < k_max; ++l) {
        s.indices.push_back(next);
        const std::vector<double> col = graph.sssp(next);
        for (int i = 0; i < n; ++i) {
            s.X(i, l) = col[i];
            if (col[i] < min_dist[i]) min_dist[i] = col[i];
        }
        // beta_l and the next index attain the same max-min; smallest index
        // wins ties so runs are reproducible.
        double beta = -1.0;
        int arg = 0;
        for (int i = 0; i < n; ++i)
            if (min_dist[i] > beta) {
                beta = min_dist[i];
                arg = i;
            }
        s.betas.push_back(beta);
        next = arg;
        if (stop(l + 1, s.betas)) {
            k = l + 1;
            break;
        }
    }
    if (k != k_max) s.X.conservativeResize(n, k);
    return s;
}

}  // namespace

FarthestSample sample_fixed_k(const DualGraph& graph, int k, const FirstFace& first) {
    if (k < 1 || k > graph.n())
        fail("sampler: sample size " + std::to_string(k) + " out of range [1," +
             std::to_string(graph.n()) + "]");
    return greedy_sample(graph, k, first, [](int, const std::vector<double>&) { return false; });
}

FarthestSample sample_epsilon(const DualGraph& graph, double epsilon, const FirstFace& first) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) fail("sampler: epsilon must be in (0,1)");
    return greedy_sample(graph, graph.n(), first,
                         [epsilon](int l, const std::vector<double>& betas) {
                             return l >= 2 && betas[0] > 0.0 && betas[l - 1] / betas[0] < epsilon;
                         });
}

std::vector<std::pair<int, double>> beta_curve(const FarthestSample& sample) {
    if (sample.k() == 0) fail("sampler: beta_curve of an empty sample");
    std::vector<std::pair<int, double>> curve;
    curve.reserve(sample.k());
    const double b1 = sample.betas[0];
    curve.emplace_back(1, 1.0);
    for (int l = 1; l < sample.k(); ++l)
        curve.emplace_back(l + 1, b1 > 0.0 ? sample.betas[l] / b1 : 0.0);
    return curve;
}

std::optional<int> beta_knee(const FarthestSample& sample, double slope_threshold) {
    const double b1 = sample.betas.empty() ? 0.0 : sample.betas[0];
    if (b1 <= 0.0) return std::nullopt;
    for (int l = 1; l < sample.k(); ++l)
        if ((sample.betas[l - 1] - sample.betas[l]) / b1 < slope_threshold) return l + 1;
    return std::nullopt;
}

void write_beta_csv(const FarthestSample& sample, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail("sampler: cannot write " + path);
    out << "l,beta,beta_over_beta1\n";
    const auto curve = beta_curve(sample);
    char buf[80];
    for (int l = 0; l < sample.k(); ++l) {
        std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g\n", curve[l].first, sample.betas[l],
                      curve[l].second);
        out << buf;
    }
}

void write_indices(const FarthestSample& sample, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail("sampler: cannot write " + path);
    for (int j : sample.indices) out << j << "\n";
}

}  // namespace fss
