#pragma once

#include <Eigen/Core>
#include <string>

#include "fss/sampler.hpp"

namespace fss {

/// Kernel argument: the distance itself (the default) or its square.
enum class KernelForm { distance, squared_distance };

/// The n x k sampled affinity block w_ij = exp(-x_ij/(2 sigma_k^2)), with
/// sigma_k the mean of the sampled distances. Rows are normalized to unit
/// Euclidean length before clustering.
struct AffinitySample {
    Eigen::MatrixXd Wk;
    double sigma_k = 0.0;
    FarthestSample sample;
    bool row_normalized = false;
    KernelForm kernel = KernelForm::distance;
};

/// Full n x n affinity with sigma = mean of all pairwise distances.
struct FullAffinity {
    Eigen::MatrixXd W;
    double sigma = 0.0;
};

/// Gaussian-kernel block over the sample's distance matrix. Throws when all
/// sampled distances are zero (degenerate mesh).
AffinitySample build_wk(FarthestSample sample, KernelForm kernel = KernelForm::distance);

/// Scales every row to unit Euclidean norm, putting the rows on S^{k-1}.
void normalize_rows(AffinitySample& aff);

struct FullAffinityOptions {
    int max_faces = 20000;
    KernelForm kernel = KernelForm::distance;
};

/// Dense affinity matrix from n sssp calls (sources run in parallel).
/// Guarded by max_faces: n^2 storage is for desk-scale studies only.
FullAffinity build_full_w(const DualGraph& graph, const FullAffinityOptions& opts = {});

/// Binary dump of Wk: magic "FSSW", u32 version, u64 n, u64 k, then
/// row-major doubles.
void write_wk_binary(const AffinitySample& aff, const std::string& path);

}  // namespace fss
