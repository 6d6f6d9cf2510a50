#pragma once

#include <Eigen/Core>
#include <array>
#include <string>
#include <vector>

#include "fss/common.hpp"

namespace fss {

/// Indexed triangle mesh. Face order is the file order and is never changed
/// internally: segmentation vectors, SDF files and ground-truth labels all
/// align by face index.
struct TriMesh {
    std::vector<Eigen::Vector3d> vertices;
    std::vector<std::array<int, 3>> faces;

    int n() const { return static_cast<int>(faces.size()); }
    int vertex_count() const { return static_cast<int>(vertices.size()); }
};

/// Per-face unit normal (right-hand rule on the stored vertex order),
/// barycenter and area.
struct FaceGeometry {
    std::vector<Eigen::Vector3d> normal;
    std::vector<Eigen::Vector3d> barycenter;
    std::vector<double> area;
};

/// One dual-graph neighbor of a face together with the shared mesh edge
/// (needed to unfold barycenters for the geodesic distance).
struct FaceNeighbor {
    int face;
    int edge_v0;
    int edge_v1;
};

/// Symmetric face adjacency. Two faces are adjacent iff they share exactly
/// one edge; boundary edges contribute nothing.
struct FaceAdjacency {
    std::vector<std::vector<FaceNeighbor>> neighbors;
    int interior_edges = 0;
    int boundary_edges = 0;
};

enum class MeshFormat { off, obj };

MeshFormat format_from_path(const std::string& path);

/// Parses an OFF or OBJ file and validates it: indices in range, three
/// distinct vertices per face, no zero-area faces. Errors identify the face
/// or line at fault.
TriMesh load_mesh(const std::string& path, MeshFormat format);
TriMesh load_mesh(const std::string& path);

/// Normals, barycenters, areas. Throws naming the face when a cross product
/// vanishes.
FaceGeometry face_geometry(const TriMesh& mesh);

/// Builds face adjacency. An edge shared by more than two faces is rejected
/// unless allow_nonmanifold is set, in which case only the first two faces
/// (in file order) keep the edge.
FaceAdjacency face_adjacency(const TriMesh& mesh, bool allow_nonmanifold = false);

/// True when every edge is shared by exactly two faces.
bool is_closed(const TriMesh& mesh);

/// Writes an ASCII PLY with one uchar RGB color per face; clusters map to
/// evenly spaced hues. labels are 1-based cluster ids.
void export_colored_mesh(const TriMesh& mesh, const std::vector<int>& labels,
                         int n_clusters, const std::string& path);

/// Evenly spaced hue palette used by the PLY export; exposed for tests.
std::array<unsigned char, 3> palette_color(int cluster, int n_clusters);

/// Closed cube surface, each square side split into subdivision^2 cells of
/// two triangles: n = 12*subdivision^2 faces. Faces are emitted side by side,
/// so face i belongs to side i / (2*subdivision^2).
TriMesh make_test_cube(int subdivision);

}  // namespace fss
