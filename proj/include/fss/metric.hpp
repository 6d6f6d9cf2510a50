#pragma once

#include <atomic>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fss/mesh.hpp"

namespace fss {

enum class MetricKind { angular, geodesic, sdf, product };

MetricKind metric_from_name(const std::string& name);
const char* metric_name(MetricKind kind);

/// Face-distance metric. eta_convex weights the angular distance across
/// convex dihedrals; concave dihedrals always get weight 1.
struct MetricSpec {
    MetricKind kind = MetricKind::geodesic;
    double eta_convex = 0.1;
};

/// Weighted face-adjacency graph. All stored weights are strictly positive:
/// zero metric distances are replaced by eps_floor at build time.
class DualGraph {
public:
    static DualGraph from_edges(int n, const std::vector<std::array<int, 2>>& edges,
                                const std::vector<double>& weights, double eps_floor);

    int n() const { return n_; }
    double eps_floor() const { return eps_floor_; }
    std::size_t edge_count() const { return weights_.size() / 2; }

    int degree(int v) const { return offsets_[v + 1] - offsets_[v]; }
    const int* neighbors(int v) const { return &targets_[offsets_[v]]; }
    const double* weights(int v) const { return &weights_[offsets_[v]]; }

    /// Single-source shortest paths (Dijkstra, binary heap with lazy
    /// deletion). Reentrant; bumps the call counter.
    std::vector<double> sssp(int source) const;

    std::uint64_t sssp_calls() const { return sssp_calls_.load(); }
    void reset_sssp_calls() const { sssp_calls_.store(0); }

    /// CSV edge list "i,j,weight", one row per undirected edge, for debugging.
    void write_edge_csv(const std::string& path) const;

    DualGraph(const DualGraph& other)
        : n_(other.n_), eps_floor_(other.eps_floor_), offsets_(other.offsets_),
          targets_(other.targets_), weights_(other.weights_),
          sssp_calls_(other.sssp_calls_.load()) {}
    DualGraph& operator=(const DualGraph&) = delete;
    DualGraph(DualGraph&& other) noexcept
        : n_(other.n_), eps_floor_(other.eps_floor_), offsets_(std::move(other.offsets_)),
          targets_(std::move(other.targets_)), weights_(std::move(other.weights_)),
          sssp_calls_(other.sssp_calls_.load()) {}

private:
    DualGraph() = default;

    int n_ = 0;
    double eps_floor_ = 0.0;
    std::vector<int> offsets_;
    std::vector<int> targets_;
    std::vector<double> weights_;
    mutable std::atomic<std::uint64_t> sssp_calls_{0};
};

/// eta*(1 - <n_i, n_j>) with eta = 1 across a concave fold (barycenter of j
/// on the positive side of face i's plane) and eta_convex otherwise.
/// Throws if the faces do not share exactly one edge.
double angular_edge_distance(const TriMesh& mesh, const FaceGeometry& geom, int i, int j,
                             double eta_convex);

/// Distance between the barycenters after unfolding face j about the shared
/// edge into face i's plane; this is the exact shortest path through that
/// edge, and it only uses in-plane quantities so it is rigid-motion
/// invariant. Throws if the faces do not share exactly one edge.
double geodesic_edge_distance(const TriMesh& mesh, const FaceGeometry& geom, int i, int j);

/// |sdf[i] - sdf[j]|.
double sdf_edge_distance(const std::vector<double>& sdf_values, int i, int j);

struct BuildGraphOptions {
    bool allow_nonmanifold = false;
};

/// Assembles the weighted dual graph: one arc per interior mesh edge, weight
/// given by the metric (for product, geodesic*angular composed before
/// flooring). Zero weights become eps_floor = a power of two near
/// 1e-8 * mean positive weight. Throws if the dual graph is disconnected,
/// reporting the component count.
DualGraph build_dual_graph(const TriMesh& mesh, const FaceGeometry& geom, const MetricSpec& metric,
                           const std::vector<double>* sdf_values = nullptr,
                           const BuildGraphOptions& opts = {});

/// Number of connected components of the face adjacency.
int dual_component_count(const FaceAdjacency& adj);

}  // namespace fss
