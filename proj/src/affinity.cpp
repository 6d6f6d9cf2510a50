#include "fss/affinity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numeric>

#include "fss/common.hpp"

namespace fss {

namespace {

double kernel_value(double d, double two_sigma_sq, KernelForm kernel) {
    const double x = kernel == KernelForm::distance ? d : d * d;
    return std::exp(-x / two_sigma_sq);
}

}  // namespace

AffinitySample build_wk(FarthestSample sample, KernelForm kernel) {
    const int n = sample.n();
    const int k = sample.k();
    if (k == 0) fail("affinity: empty sample");

    // Column sums accumulated in face-index order, so that for k = n (where X
    // is a column permutation of the full distance matrix) sigma_k equals the
    // full-matrix sigma bit for bit.
    std::vector<std::pair<int, double>> col_sums(k);
    for (int l = 0; l < k; ++l) col_sums[l] = {sample.indices[l], sample.X.col(l).sum()};
    std::sort(col_sums.begin(), col_sums.end());
    double total = 0.0;
    for (const auto& [face, s] : col_sums) total += s;

    AffinitySample aff;
    aff.sigma_k = total / (static_cast<double>(n) * static_cast<double>(k));
    if (aff.sigma_k <= 0.0)
        fail("affinity: sigma_k is zero (all sampled distances vanish; degenerate mesh)");
    const double two_sigma_sq = 2.0 * aff.sigma_k * aff.sigma_k;
    aff.kernel = kernel;
    aff.Wk.resize(n, k);
    for (int l = 0; l < k; ++l)
        for (int i = 0; i < n; ++i)
            aff.Wk(i, l) = kernel_value(sample.X(i, l), two_sigma_sq, kernel);
    aff.sample = std::move(sample);
    return aff;
}

void normalize_rows(AffinitySample& aff) {
    for (int i = 0; i < aff.Wk.rows(); ++i) {
        const double norm = aff.Wk.row(i).norm();
        if (norm == 0.0) fail("affinity: zero row in Wk");  // unreachable: entries are positive
        aff.Wk.row(i) /= norm;
    }
    aff.row_normalized = true;
}

FullAffinity build_full_w(const DualGraph& graph, const FullAffinityOptions& opts) {
    const int n = graph.n();
    if (n > opts.max_faces)
        fail("affinity: full matrix for " + std::to_string(n) + " faces exceeds the guard of " +
             std::to_string(opts.max_faces));

    Eigen::MatrixXd D(n, n);
    parallel_for(0, n, [&](std::int64_t j) {
        const std::vector<double> col = graph.sssp(static_cast<int>(j));
        for (int i = 0; i < n; ++i) D(i, j) = col[i];
    });

    double total = 0.0;
    for (int j = 0; j < n; ++j) total += D.col(j).sum();

    FullAffinity full;
    full.sigma = total / (static_cast<double>(n) * static_cast<double>(n));
    full.W.resize(n, n);
    if (full.sigma <= 0.0) {
        // Happens only when every pairwise distance is zero (n = 1); the
        // kernel at zero distance is 1 regardless of sigma.
        full.W.setOnes();
        return full;
    }
    const double two_sigma_sq = 2.0 * full.sigma * full.sigma;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            full.W(i, j) = kernel_value(D(i, j), two_sigma_sq, opts.kernel);
    return full;
}

void write_wk_binary(const AffinitySample& aff, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail("affinity: cannot write " + path);
    const char magic[4] = {'F', 'S', 'S', 'W'};
    const std::uint32_t version = 1;
    const std::uint64_t n = static_cast<std::uint64_t>(aff.Wk.rows());
    const std::uint64_t k = static_cast<std::uint64_t>(aff.Wk.cols());
    out.write(magic, 4);
    out.write(reinterpret_cast<const char*>(&version), sizeof(version));
    out.write(reinterpret_cast<const char*>(&n), sizeof(n));
    out.write(reinterpret_cast<const char*>(&k), sizeof(k));
    std::vector<double> row(static_cast<std::size_t>(k));
    for (std::uint64_t i = 0; i < n; ++i) {
        for (std::uint64_t j = 0; j < k; ++j) row[j] = aff.Wk(static_cast<int>(i), static_cast<int>(j));
        out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(k * sizeof(double)));
    }
    if (!out) fail("affinity: write to " + path + " failed");
}

}  // namespace fss
