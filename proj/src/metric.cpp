#include "fss/metric.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <queue>

namespace fss {

namespace {

// Shared edge of two triangles, or nullopt unless they share exactly two
// vertices (= exactly one edge).
std::optional<std::array<int, 2>> shared_edge(const TriMesh& mesh, int i, int j) {
    std::array<int, 2> shared{};
    int count = 0;
    for (int a : mesh.faces[i])
        for (int b : mesh.faces[j])
            if (a == b) {
                if (count < 2) shared[count] = a;
                ++count;
            }
    if (count != 2) return std::nullopt;
    return shared;
}

void require_adjacent(const TriMesh& mesh, int i, int j, const char* op) {
    if (i == j || !shared_edge(mesh, i, j))
        fail("metric_graph: " + std::string(op) + ": faces " + std::to_string(i) + " and " +
             std::to_string(j) + " are not adjacent");
}

double pow2_near(double x) { return std::exp2(std::round(std::log2(x))); }

}  // namespace

MetricKind metric_from_name(const std::string& name) {
    if (name == "angular") return MetricKind::angular;
    if (name == "geodesic") return MetricKind::geodesic;
    if (name == "sdf") return MetricKind::sdf;
    if (name == "product") return MetricKind::product;
    fail("metric_graph: unknown metric '" + name + "'");
}

const char* metric_name(MetricKind kind) {
    switch (kind) {
        case MetricKind::angular: return "angular";
        case MetricKind::geodesic: return "geodesic";
        case MetricKind::sdf: return "sdf";
        case MetricKind::product: return "product";
    }
    return "?";
}

double angular_edge_distance(const TriMesh& mesh, const FaceGeometry& geom, int i, int j,
                             double eta_convex) {
    require_adjacent(mesh, i, j, "angular_edge_distance");
    if (!(eta_convex > 0.0 && eta_convex <= 1.0))
        fail("metric_graph: eta_convex must be in (0,1]");
    const double cos_n = geom.normal[i].dot(geom.normal[j]);
    const bool concave = (geom.barycenter[j] - geom.barycenter[i]).dot(geom.normal[i]) > 0.0;
    const double eta = concave ? 1.0 : eta_convex;
    return eta * (1.0 - cos_n);
}

double geodesic_edge_distance(const TriMesh& mesh, const FaceGeometry& geom, int i, int j) {
    auto edge = shared_edge(mesh, i, j);
    if (i == j || !edge)
        fail("metric_graph: geodesic_edge_distance: faces " + std::to_string(i) + " and " +
             std::to_string(j) + " are not adjacent");
    const Eigen::Vector3d p = mesh.vertices[(*edge)[0]];
    const Eigen::Vector3d q = mesh.vertices[(*edge)[1]];
    const Eigen::Vector3d axis = (q - p).normalized();
    // In-plane coordinates of each barycenter relative to the shared edge:
    // x along the edge, y the perpendicular height. Unfolding puts the two
    // barycenters on opposite sides of the edge line.
    auto edge_coords = [&](const Eigen::Vector3d& b) {
        const Eigen::Vector3d r = b - p;
        const double x = r.dot(axis);
        const double y = (r - x * axis).norm();
        return std::array<double, 2>{x, y};
    };
    const auto bi = edge_coords(geom.barycenter[i]);
    const auto bj = edge_coords(geom.barycenter[j]);
    return std::hypot(bi[0] - bj[0], bi[1] + bj[1]);
}

double sdf_edge_distance(const std::vector<double>& sdf_values, int i, int j) {
    return std::abs(sdf_values[i] - sdf_values[j]);
}

DualGraph DualGraph::from_edges(int n, const std::vector<std::array<int, 2>>& edges,
                                const std::vector<double>& weights, double eps_floor) {
    if (edges.size() != weights.size()) fail("metric_graph: edges/weights size mismatch");
    DualGraph g;
    g.n_ = n;
    g.eps_floor_ = eps_floor;
    std::vector<int> deg(n, 0);
    for (std::size_t e = 0; e < edges.size(); ++e) {
        if (!(weights[e] > 0.0)) fail("metric_graph: graph weights must be strictly positive");
        ++deg[edges[e][0]];
        ++deg[edges[e][1]];
    }
    g.offsets_.assign(n + 1, 0);
    for (int v = 0; v < n; ++v) g.offsets_[v + 1] = g.offsets_[v] + deg[v];
    g.targets_.resize(g.offsets_[n]);
    g.weights_.resize(g.offsets_[n]);
    std::vector<int> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const int a = edges[e][0], b = edges[e][1];
        g.targets_[cursor[a]] = b;
        g.weights_[cursor[a]++] = weights[e];
        g.targets_[cursor[b]] = a;
        g.weights_[cursor[b]++] = weights[e];
    }
    return g;
}

std::vector<double> DualGraph::sssp(int source) const {
    if (source < 0 || source >= n_) fail("metric_graph: sssp source out of range");
    sssp_calls_.fetch_add(1, std::memory_order_relaxed);
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(n_, inf);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
    dist[source] = 0.0;
    heap.emplace(0.0, source);
    while (!heap.empty()) {
        const auto [d, v] = heap.top();
        heap.pop();
        if (d > dist[v]) continue;  // lazily deleted entry
        const int* nbr = neighbors(v);
        const double* w = weights(v);
        for (int e = 0; e < degree(v); ++e) {
            const double nd = d + w[e];
            if (nd < dist[nbr[e]]) {
                dist[nbr[e]] = nd;
                heap.emplace(nd, nbr[e]);
            }
        }
    }
    for (int v = 0; v < n_; ++v)
        if (dist[v] == inf)
            fail("metric_graph: node " + std::to_string(v) + " unreachable from " +
                 std::to_string(source) + " (disconnected graph)");
    return dist;
}

void DualGraph::write_edge_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) fail("metric_graph: cannot write " + path);
    out << "i,j,weight\n";
    char buf[64];
    for (int v = 0; v < n_; ++v)
        for (int e = offsets_[v]; e < offsets_[v + 1]; ++e)
            if (v < targets_[e]) {
                std::snprintf(buf, sizeof(buf), "%d,%d,%.17g\n", v, targets_[e], weights_[e]);
                out << buf;
            }
}

int dual_component_count(const FaceAdjacency& adj) {
    const int n = static_cast<int>(adj.neighbors.size());
    std::vector<int> comp(n, -1);
    int count = 0;
    std::vector<int> stack;
    for (int start = 0; start < n; ++start) {
        if (comp[start] >= 0) continue;
        comp[start] = count;
        stack.push_back(start);
        while (!stack.empty()) {
            const int v = stack.back();
            stack.pop_back();
            for (const auto& nb : adj.neighbors[v])
                if (comp[nb.face] < 0) {
                    comp[nb.face] = count;
                    stack.push_back(nb.face);
                }
        }
        ++count;
    }
    return count;
}

DualGraph build_dual_graph(const TriMesh& mesh, const FaceGeometry& geom, const MetricSpec& metric,
                           const std::vector<double>* sdf_values, const BuildGraphOptions& opts) {
    if (metric.kind == MetricKind::sdf) {
        if (sdf_values == nullptr)
            fail("metric_graph: sdf metric requires per-face SDF values");
        if (static_cast<int>(sdf_values->size()) != mesh.n())
            fail("metric_graph: SDF vector has " + std::to_string(sdf_values->size()) +
                 " entries, mesh has " + std::to_string(mesh.n()) + " faces");
    }
    const FaceAdjacency adj = face_adjacency(mesh, opts.allow_nonmanifold);
    const int comps = dual_component_count(adj);
    if (comps != 1)
        fail("metric_graph: dual graph is disconnected (" + std::to_string(comps) +
             " components); segmentation needs finite distances between all faces");

    std::vector<std::array<int, 2>> edges;
    std::vector<double> raw;
    edges.reserve(adj.interior_edges);
    raw.reserve(adj.interior_edges);
    for (int i = 0; i < mesh.n(); ++i) {
        for (const auto& nb : adj.neighbors[i]) {
            if (nb.face < i) continue;  // each undirected edge once
            double d = 0.0;
            switch (metric.kind) {
                case MetricKind::angular:
                    d = angular_edge_distance(mesh, geom, i, nb.face, metric.eta_convex);
                    break;
                case MetricKind::geodesic:
                    d = geodesic_edge_distance(mesh, geom, i, nb.face);
                    break;
                case MetricKind::sdf:
                    d = sdf_edge_distance(*sdf_values, i, nb.face);
                    break;
                case MetricKind::product:
                    d = geodesic_edge_distance(mesh, geom, i, nb.face) *
                        angular_edge_distance(mesh, geom, i, nb.face, metric.eta_convex);
                    break;
            }
            if (d < 0.0 || !std::isfinite(d))
                fail("metric_graph: invalid edge distance between faces " + std::to_string(i) +
                     " and " + std::to_string(nb.face));
            edges.push_back({i, nb.face});
            raw.push_back(d);
        }
    }

    double positive_sum = 0.0;
    std::size_t positive_count = 0;
    for (double d : raw)
        if (d > 0.0) {
            positive_sum += d;
            ++positive_count;
        }
    // Snapped to a power of two so that graphs whose positive weights are
    // dyadic stay exactly summable in double arithmetic.
    const double eps_floor =
        positive_count == 0 ? 0x1.0p-27
                            : pow2_near(1e-8 * (positive_sum / static_cast<double>(positive_count)));
    for (double& d : raw)
        if (d == 0.0) d = eps_floor;
    return DualGraph::from_edges(mesh.n(), edges, raw, eps_floor);
}

}  // namespace fss
