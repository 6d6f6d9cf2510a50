#include "fss/mesh.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace fss {

namespace {

std::string lower_ext(const std::string& path) {
    auto dot = path.find_last_of('.');
    if (dot == std::string::npos) return "";
    std::string ext = path.substr(dot + 1);
    for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return ext;
}

void validate(const TriMesh& mesh) {
    const int nv = mesh.vertex_count();
    for (int f = 0; f < mesh.n(); ++f) {
        const auto& face = mesh.faces[f];
        for (int idx : face) {
            if (idx < 0 || idx >= nv)
                fail("mesh_io: face " + std::to_string(f) + " references vertex " +
                     std::to_string(idx) + " but only " + std::to_string(nv) + " vertices exist");
        }
        if (face[0] == face[1] || face[1] == face[2] || face[0] == face[2])
            fail("mesh_io: face " + std::to_string(f) + " has repeated vertices");
        const Eigen::Vector3d e1 = mesh.vertices[face[1]] - mesh.vertices[face[0]];
        const Eigen::Vector3d e2 = mesh.vertices[face[2]] - mesh.vertices[face[0]];
        if (e1.cross(e2).norm() == 0.0)
            fail("mesh_io: face " + std::to_string(f) + " is degenerate (zero area)");
    }
}

// Token stream over the file that skips blank lines and '#' comments and
// remembers the current line for error messages.
class TokenReader {
public:
    explicit TokenReader(const std::string& path) : in_(path), path_(path) {
        if (!in_) fail("mesh_io: cannot open " + path);
    }

    bool next(std::string& tok) {
        for (;;) {
            if (pos_ >= line_.size()) {
                if (!std::getline(in_, line_)) return false;
                ++line_no_;
                pos_ = 0;
                continue;
            }
            while (pos_ < line_.size() && std::isspace(static_cast<unsigned char>(line_[pos_]))) ++pos_;
            if (pos_ >= line_.size()) continue;
            if (line_[pos_] == '#') {  // comment to end of line
                pos_ = line_.size();
                continue;
            }
            std::size_t start = pos_;
            while (pos_ < line_.size() && !std::isspace(static_cast<unsigned char>(line_[pos_]))) ++pos_;
            tok = line_.substr(start, pos_ - start);
            return true;
        }
    }

    double next_double(const char* what) {
        std::string tok = require(what);
        try {
            std::size_t used = 0;
            double v = std::stod(tok, &used);
            if (used != tok.size()) throw std::invalid_argument(tok);
            return v;
        } catch (const std::exception&) {
            fail("mesh_io: " + path_ + ":" + std::to_string(line_no_) + ": expected " +
                 std::string(what) + ", got '" + tok + "'");
        }
    }

    long next_int(const char* what) {
        std::string tok = require(what);
        try {
            std::size_t used = 0;
            long v = std::stol(tok, &used);
            if (used != tok.size()) throw std::invalid_argument(tok);
            return v;
        } catch (const std::exception&) {
            fail("mesh_io: " + path_ + ":" + std::to_string(line_no_) + ": expected " +
                 std::string(what) + ", got '" + tok + "'");
        }
    }

    std::string require(const char* what) {
        std::string tok;
        if (!next(tok))
            fail("mesh_io: " + path_ + ": unexpected end of file, expected " + std::string(what));
        return tok;
    }

    int line_no() const { return line_no_; }
    const std::string& path() const { return path_; }

private:
    std::ifstream in_;
    std::string path_;
    std::string line_;
    std::size_t pos_ = 0;
    int line_no_ = 0;
};

TriMesh load_off(const std::string& path) {
    TokenReader tr(path);
    std::string header = tr.require("OFF header");
    if (header != "OFF")
        fail("mesh_io: " + path + " is not an OFF file (header '" + header + "')");
    long nv = tr.next_int("vertex count");
    long nf = tr.next_int("face count");
    tr.next_int("edge count");
    if (nv < 0 || nf < 0) fail("mesh_io: " + path + ": negative counts");

    TriMesh mesh;
    mesh.vertices.reserve(static_cast<std::size_t>(nv));
    for (long i = 0; i < nv; ++i) {
        double x = tr.next_double("vertex coordinate");
        double y = tr.next_double("vertex coordinate");
        double z = tr.next_double("vertex coordinate");
        mesh.vertices.emplace_back(x, y, z);
    }
    mesh.faces.reserve(static_cast<std::size_t>(nf));
    for (long f = 0; f < nf; ++f) {
        long cnt = tr.next_int("face vertex count");
        if (cnt != 3)
            fail("mesh_io: " + path + ":" + std::to_string(tr.line_no()) + ": face " +
                 std::to_string(f) + " has " + std::to_string(cnt) + " vertices, only triangles are supported");
        int a = static_cast<int>(tr.next_int("vertex index"));
        int b = static_cast<int>(tr.next_int("vertex index"));
        int c = static_cast<int>(tr.next_int("vertex index"));
        mesh.faces.push_back({a, b, c});
    }
    return mesh;
}

// Accepts "7", "7/2", "7//3", "7/2/3"; only the vertex slot is used.
int obj_vertex_index(const std::string& tok, const std::string& path, int line_no, int nv) {
    std::string head = tok.substr(0, tok.find('/'));
    long v = 0;
    try {
        std::size_t used = 0;
        v = std::stol(head, &used);
        if (used != head.size()) throw std::invalid_argument(head);
    } catch (const std::exception&) {
        fail("mesh_io: " + path + ":" + std::to_string(line_no) + ": bad face index '" + tok + "'");
    }
    if (v < 1 || v > nv)
        fail("mesh_io: " + path + ":" + std::to_string(line_no) + ": face index " +
             std::to_string(v) + " out of range (1.." + std::to_string(nv) + ")");
    return static_cast<int>(v - 1);
}

TriMesh load_obj(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("mesh_io: cannot open " + path);
    TriMesh mesh;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag) || tag[0] == '#') continue;
        if (tag == "v") {
            double x, y, z;
            if (!(ls >> x >> y >> z))
                fail("mesh_io: " + path + ":" + std::to_string(line_no) + ": malformed vertex");
            mesh.vertices.emplace_back(x, y, z);
        } else if (tag == "f") {
            std::vector<std::string> toks;
            std::string t;
            while (ls >> t) toks.push_back(t);
            if (toks.size() != 3)
                fail("mesh_io: " + path + ":" + std::to_string(line_no) +
                     ": only triangular faces are supported (got " + std::to_string(toks.size()) +
                     " vertices)");
            const int nv = mesh.vertex_count();
            mesh.faces.push_back({obj_vertex_index(toks[0], path, line_no, nv),
                                  obj_vertex_index(toks[1], path, line_no, nv),
                                  obj_vertex_index(toks[2], path, line_no, nv)});
        }
        // every other record type (vt, vn, usemtl, ...) is ignored
    }
    return mesh;
}

std::uint64_t edge_key(int a, int b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
           static_cast<std::uint32_t>(b);
}

}  // namespace

MeshFormat format_from_path(const std::string& path) {
    std::string ext = lower_ext(path);
    if (ext == "off") return MeshFormat::off;
    if (ext == "obj") return MeshFormat::obj;
    fail("mesh_io: cannot guess format of '" + path + "' (expected .off or .obj)");
}

TriMesh load_mesh(const std::string& path, MeshFormat format) {
    TriMesh mesh = format == MeshFormat::off ? load_off(path) : load_obj(path);
    validate(mesh);
    return mesh;
}

TriMesh load_mesh(const std::string& path) { return load_mesh(path, format_from_path(path)); }

FaceGeometry face_geometry(const TriMesh& mesh) {
    FaceGeometry geom;
    const int n = mesh.n();
    geom.normal.resize(n);
    geom.barycenter.resize(n);
    geom.area.resize(n);
    for (int f = 0; f < n; ++f) {
        const auto& face = mesh.faces[f];
        const Eigen::Vector3d& a = mesh.vertices[face[0]];
        const Eigen::Vector3d& b = mesh.vertices[face[1]];
        const Eigen::Vector3d& c = mesh.vertices[face[2]];
        const Eigen::Vector3d cross = (b - a).cross(c - a);
        const double len = cross.norm();
        if (len == 0.0) fail("mesh_io: face " + std::to_string(f) + " is degenerate (zero normal)");
        geom.normal[f] = cross / len;
        geom.barycenter[f] = (a + b + c) / 3.0;
        geom.area[f] = 0.5 * len;
    }
    return geom;
}

FaceAdjacency face_adjacency(const TriMesh& mesh, bool allow_nonmanifold) {
    std::unordered_map<std::uint64_t, std::vector<int>> edge_faces;
    edge_faces.reserve(static_cast<std::size_t>(mesh.n()) * 3);
    for (int f = 0; f < mesh.n(); ++f) {
        const auto& face = mesh.faces[f];
        for (int e = 0; e < 3; ++e)
            edge_faces[edge_key(face[e], face[(e + 1) % 3])].push_back(f);
    }

    // Count shared edges per face pair; a pair sharing more than one edge is
    // not adjacent (it would have an ambiguous unfolding edge).
    std::unordered_map<std::uint64_t, int> pair_edges;
    FaceAdjacency adj;
    adj.neighbors.resize(mesh.n());
    for (auto& [key, faces] : edge_faces) {
        if (faces.size() > 2) {
            if (!allow_nonmanifold) {
                const int a = static_cast<int>(key >> 32);
                const int b = static_cast<int>(key & 0xffffffffu);
                fail("mesh_io: non-manifold edge (" + std::to_string(a) + "," + std::to_string(b) +
                     ") shared by " + std::to_string(faces.size()) + " faces");
            }
            faces.resize(2);
        }
        if (faces.size() == 2) ++pair_edges[edge_key(faces[0], faces[1])];
    }
    for (const auto& [key, faces] : edge_faces) {
        if (faces.size() == 1) {
            ++adj.boundary_edges;
            continue;
        }
        if (faces.size() < 2) continue;
        if (pair_edges[edge_key(faces[0], faces[1])] != 1) continue;
        ++adj.interior_edges;
        const int v0 = static_cast<int>(key >> 32);
        const int v1 = static_cast<int>(key & 0xffffffffu);
        adj.neighbors[faces[0]].push_back({faces[1], v0, v1});
        adj.neighbors[faces[1]].push_back({faces[0], v0, v1});
    }
    for (auto& list : adj.neighbors)
        std::sort(list.begin(), list.end(),
                  [](const FaceNeighbor& x, const FaceNeighbor& y) { return x.face < y.face; });
    return adj;
}

bool is_closed(const TriMesh& mesh) {
    std::unordered_map<std::uint64_t, int> edge_count;
    for (const auto& face : mesh.faces)
        for (int e = 0; e < 3; ++e) ++edge_count[edge_key(face[e], face[(e + 1) % 3])];
    for (const auto& [key, cnt] : edge_count)
        if (cnt != 2) return false;
    return !mesh.faces.empty();
}

std::array<unsigned char, 3> palette_color(int cluster, int n_clusters) {
    // Evenly spaced hues, fixed saturation/value; purely presentational.
    const double h = 6.0 * static_cast<double>(cluster % n_clusters) / n_clusters;
    const double s = 0.72, v = 0.95;
    const int sector = static_cast<int>(h) % 6;
    const double f = h - std::floor(h);
    const double p = v * (1.0 - s);
    const double q = v * (1.0 - s * f);
    const double t = v * (1.0 - s * (1.0 - f));
    double r = 0, g = 0, b = 0;
    switch (sector) {
        case 0: r = v; g = t; b = p; break;
        case 1: r = q; g = v; b = p; break;
        case 2: r = p; g = v; b = t; break;
        case 3: r = p; g = q; b = v; break;
        case 4: r = t; g = p; b = v; break;
        default: r = v; g = p; b = q; break;
    }
    auto byte = [](double x) { return static_cast<unsigned char>(std::lround(x * 255.0)); };
    return {byte(r), byte(g), byte(b)};
}

void export_colored_mesh(const TriMesh& mesh, const std::vector<int>& labels,
                         int n_clusters, const std::string& path) {
    if (static_cast<int>(labels.size()) != mesh.n())
        fail("mesh_io: segmentation has " + std::to_string(labels.size()) + " labels but mesh has " +
             std::to_string(mesh.n()) + " faces");
    if (n_clusters < 1) fail("mesh_io: n_clusters must be positive");
    std::ofstream out(path);
    if (!out) fail("mesh_io: cannot write " + path);
    out << "ply\nformat ascii 1.0\n";
    out << "element vertex " << mesh.vertex_count() << "\n";
    out << "property double x\nproperty double y\nproperty double z\n";
    out << "element face " << mesh.n() << "\n";
    out << "property list uchar int vertex_indices\n";
    out << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
    out << "end_header\n";
    char buf[128];
    for (const auto& v : mesh.vertices) {
        std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g\n", v.x(), v.y(), v.z());
        out << buf;
    }
    for (int f = 0; f < mesh.n(); ++f) {
        const auto color = palette_color(labels[f] - 1, n_clusters);
        out << "3 " << mesh.faces[f][0] << ' ' << mesh.faces[f][1] << ' ' << mesh.faces[f][2] << ' '
            << static_cast<int>(color[0]) << ' ' << static_cast<int>(color[1]) << ' '
            << static_cast<int>(color[2]) << "\n";
    }
    if (!out) fail("mesh_io: write to " + path + " failed");
}

TriMesh make_test_cube(int subdivision) {
    if (subdivision < 1) fail("mesh_io: cube subdivision must be >= 1");
    const int s = subdivision;
    TriMesh mesh;
    std::unordered_map<std::uint64_t, int> lattice;  // (i,j,k) -> vertex id
    auto vertex = [&](int i, int j, int k) {
        const std::uint64_t key = (static_cast<std::uint64_t>(i) << 42) |
                                  (static_cast<std::uint64_t>(j) << 21) |
                                  static_cast<std::uint64_t>(k);
        auto it = lattice.find(key);
        if (it != lattice.end()) return it->second;
        const int id = mesh.vertex_count();
        mesh.vertices.emplace_back(static_cast<double>(i) / s, static_cast<double>(j) / s,
                                   static_cast<double>(k) / s);
        lattice.emplace(key, id);
        return id;
    };

    struct Side {
        std::array<int, 3> origin, u, v;  // lattice steps; u x v points outward
    };
    const Side sides[6] = {
        {{0, 0, 0}, {0, 0, 1}, {0, 1, 0}},  // -x
        {{s, 0, 0}, {0, 1, 0}, {0, 0, 1}},  // +x
        {{0, 0, 0}, {1, 0, 0}, {0, 0, 1}},  // -y
        {{0, s, 0}, {0, 0, 1}, {1, 0, 0}},  // +y
        {{0, 0, 0}, {0, 1, 0}, {1, 0, 0}},  // -z
        {{0, 0, s}, {1, 0, 0}, {0, 1, 0}},  // +z
    };
    mesh.faces.reserve(static_cast<std::size_t>(12) * s * s);
    for (const Side& side : sides) {
        for (int a = 0; a < s; ++a) {
            for (int b = 0; b < s; ++b) {
                auto corner = [&](int da, int db) {
                    return vertex(side.origin[0] + (a + da) * side.u[0] + (b + db) * side.v[0],
                                  side.origin[1] + (a + da) * side.u[1] + (b + db) * side.v[1],
                                  side.origin[2] + (a + da) * side.u[2] + (b + db) * side.v[2]);
                };
                const int p00 = corner(0, 0), p10 = corner(1, 0);
                const int p11 = corner(1, 1), p01 = corner(0, 1);
                mesh.faces.push_back({p00, p10, p11});
                mesh.faces.push_back({p00, p11, p01});
            }
        }
    }
    return mesh;
}

}  // namespace fss
