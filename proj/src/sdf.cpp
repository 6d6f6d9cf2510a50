#include "fss/sdf.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <memory>
#include <numeric>
#include <sstream>

#include "fss/common.hpp"

namespace fss {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kGoldenAngle = 2.39996322972865332223;

struct Ray {
    Eigen::Vector3d origin;
    Eigen::Vector3d dir;  // unit
};

// Moller-Trumbore. Returns the ray parameter t of the hit, or -1. Hits with
// |dir . normal| below the grazing threshold are rejected as unreliable.
double intersect_triangle(const Ray& ray, const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                          const Eigen::Vector3d& c, double t_min) {
    const Eigen::Vector3d e1 = b - a;
    const Eigen::Vector3d e2 = c - a;
    const Eigen::Vector3d pvec = ray.dir.cross(e2);
    const double det = e1.dot(pvec);
    if (std::abs(det) < 1e-14) return -1.0;  // parallel
    const double inv_det = 1.0 / det;
    const Eigen::Vector3d tvec = ray.origin - a;
    const double u = tvec.dot(pvec) * inv_det;
    if (u < 0.0 || u > 1.0) return -1.0;
    const Eigen::Vector3d qvec = tvec.cross(e1);
    const double v = ray.dir.dot(qvec) * inv_det;
    if (v < 0.0 || u + v > 1.0) return -1.0;
    const double t = e2.dot(qvec) * inv_det;
    if (t <= t_min) return -1.0;
    const Eigen::Vector3d n = e1.cross(e2);
    const double cos_incidence = std::abs(ray.dir.dot(n)) / n.norm();
    if (cos_incidence < 1e-6) return -1.0;  // grazing
    return t;
}

struct Aabb {
    Eigen::Vector3d lo = Eigen::Vector3d::Constant(std::numeric_limits<double>::infinity());
    Eigen::Vector3d hi = Eigen::Vector3d::Constant(-std::numeric_limits<double>::infinity());

    void grow(const Eigen::Vector3d& p) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    void grow(const Aabb& o) {
        lo = lo.cwiseMin(o.lo);
        hi = hi.cwiseMax(o.hi);
    }
    // Slab test against [0, t_best].
    bool hit(const Ray& ray, double t_best) const {
        double t0 = 0.0, t1 = t_best;
        for (int ax = 0; ax < 3; ++ax) {
            const double inv = 1.0 / ray.dir[ax];
            double near = (lo[ax] - ray.origin[ax]) * inv;
            double far = (hi[ax] - ray.origin[ax]) * inv;
            if (inv < 0.0) std::swap(near, far);
            t0 = std::max(t0, near);
            t1 = std::min(t1, far);
            if (t0 > t1) return false;
        }
        return true;
    }
};

// Median-split AABB tree; leafs keep a handful of faces. Plain and adequate
// for benchmark-scale meshes.
class BvhTree {
public:
    BvhTree(const TriMesh& mesh, const FaceGeometry& geom) : mesh_(mesh) {
        const int n = mesh.n();
        order_.resize(n);
        std::iota(order_.begin(), order_.end(), 0);
        boxes_.resize(n);
        for (int f = 0; f < n; ++f) {
            for (int v : mesh.faces[f]) boxes_[f].grow(mesh.vertices[v]);
        }
        centers_ = &geom.barycenter;
        nodes_.reserve(2 * n);
        build(0, n);
    }

    // First hit excluding skip_face; returns t or -1.
    double first_hit(const Ray& ray, int skip_face, double t_min) const {
        double best = std::numeric_limits<double>::infinity();
        walk(0, ray, skip_face, t_min, best);
        return std::isfinite(best) ? best : -1.0;
    }

private:
    struct Node {
        Aabb box;
        int begin = 0, end = 0;   // leaf range in order_
        int left = -1, right = -1;
    };

    int build(int begin, int end) {
        const int id = static_cast<int>(nodes_.size());
        nodes_.push_back({});
        Aabb box;
        for (int i = begin; i < end; ++i) box.grow(boxes_[order_[i]]);
        nodes_[id].box = box;
        if (end - begin <= 4) {
            nodes_[id].begin = begin;
            nodes_[id].end = end;
            return id;
        }
        const Eigen::Vector3d extent = box.hi - box.lo;
        int axis = 0;
        if (extent[1] > extent[axis]) axis = 1;
        if (extent[2] > extent[axis]) axis = 2;
        const int mid = (begin + end) / 2;
        std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                         [&](int a, int b) { return (*centers_)[a][axis] < (*centers_)[b][axis]; });
        const int left = build(begin, mid);
        const int right = build(mid, end);
        nodes_[id].left = left;
        nodes_[id].right = right;
        return id;
    }

    void walk(int id, const Ray& ray, int skip_face, double t_min, double& best) const {
        const Node& node = nodes_[id];
        if (!node.box.hit(ray, best)) return;
        if (node.left < 0) {
            for (int i = node.begin; i < node.end; ++i) {
                const int f = order_[i];
                if (f == skip_face) continue;
                const auto& face = mesh_.faces[f];
                const double t = intersect_triangle(ray, mesh_.vertices[face[0]],
                                                    mesh_.vertices[face[1]], mesh_.vertices[face[2]],
                                                    t_min);
                if (t > 0.0 && t < best) best = t;
            }
            return;
        }
        walk(node.left, ray, skip_face, t_min, best);
        walk(node.right, ray, skip_face, t_min, best);
    }

    const TriMesh& mesh_;
    const std::vector<Eigen::Vector3d>* centers_ = nullptr;
    std::vector<int> order_;
    std::vector<Aabb> boxes_;
    std::vector<Node> nodes_;
};

double brute_first_hit(const TriMesh& mesh, const Ray& ray, int skip_face, double t_min) {
    double best = std::numeric_limits<double>::infinity();
    for (int f = 0; f < mesh.n(); ++f) {
        if (f == skip_face) continue;
        const auto& face = mesh.faces[f];
        const double t = intersect_triangle(ray, mesh.vertices[face[0]], mesh.vertices[face[1]],
                                            mesh.vertices[face[2]], t_min);
        if (t > 0.0 && t < best) best = t;
    }
    return std::isfinite(best) ? best : -1.0;
}

}  // namespace

std::vector<double> compute_sdf(const TriMesh& mesh, const FaceGeometry& geom,
                                const SdfConfig& cfg) {
    if (!(cfg.cone_half_angle_deg > 0.0 && cfg.cone_half_angle_deg < 90.0))
        fail("sdf: cone half angle must be in (0,90) degrees");
    if (cfg.rays_per_face < 1) fail("sdf: rays_per_face must be >= 1");
    if (!is_closed(mesh))
        fail("sdf: mesh is not watertight; inward rays have no guaranteed intersection");

    Aabb bounds;
    for (const auto& v : mesh.vertices) bounds.grow(v);
    const double diag = (bounds.hi - bounds.lo).norm();
    const double t_min = 1e-9 * diag;

    const bool use_tree = mesh.n() > cfg.brute_force_max_faces;
    std::unique_ptr<BvhTree> tree;
    if (use_tree) tree = std::make_unique<BvhTree>(mesh, geom);

    const int rays = cfg.rays_per_face;
    const double cos_max = std::cos(cfg.cone_half_angle_deg * kPi / 180.0);
    const int n = mesh.n();
    std::vector<double> sdf(n);
    std::vector<std::string> face_error(1);
    std::atomic<bool> failed{false};

    parallel_for(0, n, [&](std::int64_t fi) {
        if (failed.load()) return;
        const int f = static_cast<int>(fi);
        const Eigen::Vector3d axis = -geom.normal[f];
        // Orthonormal frame around the cone axis.
        Eigen::Vector3d t1 = std::abs(axis.x()) < 0.9 ? Eigen::Vector3d::UnitX()
                                                      : Eigen::Vector3d::UnitY();
        t1 = (t1 - t1.dot(axis) * axis).normalized();
        const Eigen::Vector3d t2 = axis.cross(t1);

        std::mt19937_64 rng(mix_seed(cfg.seed, 0x73646621ULL + static_cast<std::uint64_t>(f)));
        std::vector<double> lengths, angles;
        lengths.reserve(rays);
        angles.reserve(rays);
        for (int m = 0; m < rays; ++m) {
            // Area-uniform spiral on the cap, jittered within its own cell.
            const double jitter_u = (unit_double(rng) - 0.5) / rays;
            const double u = std::clamp((m + 0.5) / rays + jitter_u, 0.0, 1.0);
            const double cos_phi = 1.0 - u * (1.0 - cos_max);
            const double sin_phi = std::sqrt(std::max(0.0, 1.0 - cos_phi * cos_phi));
            const double az = m * kGoldenAngle + unit_double(rng) * (2.0 * kPi / rays);
            Ray ray{geom.barycenter[f],
                    sin_phi * (std::cos(az) * t1 + std::sin(az) * t2) + cos_phi * axis};
            const double t = use_tree ? tree->first_hit(ray, f, t_min)
                                      : brute_first_hit(mesh, ray, f, t_min);
            if (t > 0.0) {
                lengths.push_back(t);
                angles.push_back(std::acos(std::clamp(cos_phi, -1.0, 1.0)));
            }
        }
        if (lengths.empty()) {
            if (!failed.exchange(true))
                face_error[0] = "sdf: all rays missed for face " + std::to_string(f);
            return;
        }

        std::vector<double> sorted = lengths;
        std::sort(sorted.begin(), sorted.end());
        const std::size_t h = sorted.size() / 2;
        const double median =
            sorted.size() % 2 == 1 ? sorted[h] : 0.5 * (sorted[h - 1] + sorted[h]);
        double mean = 0.0;
        for (double v : lengths) mean += v;
        mean /= static_cast<double>(lengths.size());
        double var = 0.0;
        for (double v : lengths) var += (v - mean) * (v - mean);
        const double stddev = std::sqrt(var / static_cast<double>(lengths.size()));

        double wsum = 0.0, acc = 0.0;
        for (std::size_t m = 0; m < lengths.size(); ++m) {
            if (std::abs(lengths[m] - median) > cfg.outlier_sigma * stddev) continue;
            const double w = 1.0 / std::max(angles[m], 1e-4);
            wsum += w;
            acc += w * lengths[m];
        }
        if (wsum == 0.0) {
            // every length landed outside the band (possible with an even
            // count, where the median is not an element); keep the nearest
            std::size_t best = 0;
            for (std::size_t m = 1; m < lengths.size(); ++m)
                if (std::abs(lengths[m] - median) < std::abs(lengths[best] - median)) best = m;
            sdf[f] = lengths[best];
        } else {
            sdf[f] = acc / wsum;
        }
    });
    if (failed.load()) fail(face_error[0]);
    return sdf;
}

std::vector<double> load_sdf(const std::string& path, int expected_n) {
    std::ifstream in(path);
    if (!in) fail("sdf: cannot open " + path);
    std::vector<double> values;
    values.reserve(expected_n);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok)) continue;  // blank line
        double v = 0.0;
        try {
            std::size_t used = 0;
            v = std::stod(tok, &used);
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            fail("sdf: " + path + ":" + std::to_string(line_no) + ": not a number: '" + tok + "'");
        }
        std::string extra;
        if (ls >> extra)
            fail("sdf: " + path + ":" + std::to_string(line_no) + ": expected one value per line");
        if (!std::isfinite(v))
            fail("sdf: " + path + ":" + std::to_string(line_no) + ": value is not finite");
        values.push_back(v);
    }
    if (static_cast<int>(values.size()) != expected_n)
        fail("sdf: " + path + " has " + std::to_string(values.size()) + " values, expected " +
             std::to_string(expected_n));
    return values;
}

void save_sdf(const std::vector<double>& values, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail("sdf: cannot write " + path);
    char buf[40];
    for (double v : values) {
        std::snprintf(buf, sizeof(buf), "%.17g\n", v);
        out << buf;
    }
    if (!out) fail("sdf: write to " + path + " failed");
}

}  // namespace fss
