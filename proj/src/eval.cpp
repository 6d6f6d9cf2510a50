#include "fss/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <unordered_map>

#include "fss/common.hpp"

namespace fss {

namespace {

std::uint64_t choose2(std::uint64_t m) { return m * (m - 1) / 2; }

// Dense relabeling so arbitrary external label values index a contingency table.
std::vector<int> densify(const std::vector<int>& labels, int& n_distinct) {
    std::unordered_map<int, int> map;
    std::vector<int> out(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const auto it = map.emplace(labels[i], static_cast<int>(map.size())).first;
        out[i] = it->second;
    }
    n_distinct = static_cast<int>(map.size());
    return out;
}

}  // namespace

PairCounts pair_counts(const std::vector<int>& a, const std::vector<int>& b) {
    if (a.size() != b.size())
        fail("eval: segmentations differ in length (" + std::to_string(a.size()) + " vs " +
             std::to_string(b.size()) + ")");
    const std::uint64_t n = a.size();
    int na = 0, nb = 0;
    const std::vector<int> da = densify(a, na);
    const std::vector<int> db = densify(b, nb);

    std::unordered_map<std::uint64_t, std::uint64_t> joint;
    std::vector<std::uint64_t> row(na, 0), col(nb, 0);
    for (std::uint64_t i = 0; i < n; ++i) {
        ++joint[(static_cast<std::uint64_t>(da[i]) << 32) | static_cast<std::uint32_t>(db[i])];
        ++row[da[i]];
        ++col[db[i]];
    }

    PairCounts pc;
    pc.total = choose2(n);
    for (const auto& [key, cnt] : joint) pc.n11 += choose2(cnt);
    std::uint64_t same_a = 0, same_b = 0;
    for (std::uint64_t r : row) same_a += choose2(r);
    for (std::uint64_t c : col) same_b += choose2(c);
    pc.n10 = same_a - pc.n11;
    pc.n01 = same_b - pc.n11;
    pc.n00 = pc.total - pc.n11 - pc.n10 - pc.n01;
    return pc;
}

double rand_index(const std::vector<int>& a, const std::vector<int>& b) {
    const PairCounts pc = pair_counts(a, b);
    if (pc.total == 0) return 1.0;
    return static_cast<double>(pc.n11 + pc.n00) / static_cast<double>(pc.total);
}

double jaccard_index(const std::vector<int>& a, const std::vector<int>& b) {
    const PairCounts pc = pair_counts(a, b);
    const std::uint64_t denom = pc.n11 + pc.n10 + pc.n01;
    if (denom == 0) return 1.0;  // both all-singleton: pairwise identical
    return static_cast<double>(pc.n11) / static_cast<double>(denom);
}

double seg_distance(const std::vector<int>& a, const std::vector<int>& b, SegDistanceKind kind) {
    return 1.0 - (kind == SegDistanceKind::rand ? rand_index(a, b) : jaccard_index(a, b));
}

ConsistencyHistogram consistency_histogram(const DualGraph& graph,
                                           const std::vector<double>& fractions,
                                           const HistogramOptions& opts) {
    if (graph.n() > opts.max_faces)
        fail("eval: full-matrix reference for " + std::to_string(graph.n()) +
             " faces exceeds the guard of " + std::to_string(opts.max_faces));
    if (opts.trials < 1) fail("eval: trials must be >= 1");

    SegmentOptions ref_opts;
    ref_opts.n_c = opts.n_c;
    ref_opts.sampling = SamplingSpec::frac(1.0);
    ref_opts.sample_seed = mix_seed(opts.seed, 0x726566ULL);
    ref_opts.kmeans_seed = mix_seed(opts.seed, 0x726566ULL + 1);
    ref_opts.kernel = opts.kernel;
    const SegmentResult reference = segment_graph(graph, ref_opts);

    ConsistencyHistogram hist;
    hist.fractions = fractions;
    hist.bins = opts.bins;
    hist.distances.resize(fractions.size());
    for (std::size_t fi = 0; fi < fractions.size(); ++fi) {
        hist.distances[fi].resize(opts.trials);
        for (int t = 0; t < opts.trials; ++t) {
            SegmentOptions run = ref_opts;
            run.sampling = SamplingSpec::frac(fractions[fi]);
            run.sample_seed = mix_seed(opts.seed, 0x68697374ULL + fi * 1000003ULL + t * 2ULL);
            run.kmeans_seed = mix_seed(opts.seed, 0x68697374ULL + fi * 1000003ULL + t * 2ULL + 1);
            const SegmentResult trial = segment_graph(graph, run);
            hist.distances[fi][t] =
                seg_distance(trial.seg.labels, reference.seg.labels, SegDistanceKind::rand);
        }
    }
    return hist;
}

void write_histogram_csv(const ConsistencyHistogram& hist, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail("eval: cannot write " + path);
    out << "fraction,bin_lo,bin_hi,rel_freq\n";
    char buf[128];
    for (std::size_t fi = 0; fi < hist.fractions.size(); ++fi) {
        const auto& vals = hist.distances[fi];
        std::vector<int> counts(hist.bins, 0);
        for (double v : vals) {
            int b = static_cast<int>(v * hist.bins);
            b = std::clamp(b, 0, hist.bins - 1);
            ++counts[b];
        }
        for (int b = 0; b < hist.bins; ++b) {
            std::snprintf(buf, sizeof(buf), "%.6g,%.6g,%.6g,%.6g\n", hist.fractions[fi],
                          static_cast<double>(b) / hist.bins, static_cast<double>(b + 1) / hist.bins,
                          static_cast<double>(counts[b]) / static_cast<double>(vals.size()));
            out << buf;
        }
    }
}

}  // namespace fss
