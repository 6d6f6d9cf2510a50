#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fss/cluster.hpp"

namespace fss {

/// Pair-counting summary of two segmentations: co-clustered in both (n11),
/// separated in both (n00), discordant (n10, n01). n11+n00+n10+n01 = C(n,2).
struct PairCounts {
    std::uint64_t n11 = 0;
    std::uint64_t n00 = 0;
    std::uint64_t n10 = 0;
    std::uint64_t n01 = 0;
    std::uint64_t total = 0;
};

PairCounts pair_counts(const std::vector<int>& a, const std::vector<int>& b);

/// RI = (n11 + n00) / total; 1 iff the segmentations agree up to a label
/// permutation. Defined as 1 for n <= 1 (no pairs).
double rand_index(const std::vector<int>& a, const std::vector<int>& b);

/// JI = n11 / (n11 + n10 + n01); the denominator vanishes only when both
/// segmentations are all singletons, which are pairwise identical, so that
/// case is 1.
double jaccard_index(const std::vector<int>& a, const std::vector<int>& b);

enum class SegDistanceKind { rand, jaccard };

/// 1 - index, in [0,1].
double seg_distance(const std::vector<int>& a, const std::vector<int>& b, SegDistanceKind kind);

struct HistogramOptions {
    int n_c = 2;
    int trials = 10;
    std::uint64_t seed = 0;
    int bins = 20;
    KernelForm kernel = KernelForm::distance;
    int max_faces = 5000;  // guard on the full-matrix reference run
};

struct ConsistencyHistogram {
    std::vector<double> fractions;
    std::vector<std::vector<double>> distances;  // [fraction][trial] Rand distances
    int bins = 0;
};

/// For each sample fraction, the Rand distance between the fraction-run
/// segmentation and a full-matrix reference segmentation, over `trials`
/// independent seed pairs.
ConsistencyHistogram consistency_histogram(const DualGraph& graph,
                                           const std::vector<double>& fractions,
                                           const HistogramOptions& opts);

/// CSV rows "fraction,bin_lo,bin_hi,rel_freq" over uniform bins of [0,1].
void write_histogram_csv(const ConsistencyHistogram& hist, const std::string& path);

}  // namespace fss
