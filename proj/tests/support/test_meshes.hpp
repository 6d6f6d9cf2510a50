#pragma once

#include <vector>

#include "fss/mesh.hpp"

namespace fss_test {

/// Unit icosahedron subdivided `level` times and projected to the sphere of
/// radius r; watertight. level 0 = 20 faces, each level quadruples.
fss::TriMesh icosphere(int level, double radius = 1.0);

/// Watertight torus, nu x nv quads of two triangles each.
fss::TriMesh torus(int nu, int nv, double major = 1.0, double minor = 0.35);

/// Watertight surface of revolution with a two-bulb (peanut) profile; poles
/// closed by triangle fans. Faces ~ 2*nu*(nv-1).
fss::TriMesh peanut(int nu, int nv);

/// Watertight axis-aligned box [0,w]x[0,h]x[0,t] with per-side grids sized to
/// keep triangles near-square. Use thin t for slab tests.
fss::TriMesh slab(double w, double h, double t, int nx, int ny, int nz);

/// Open planar grid patch in z=0 (has boundary; not watertight).
fss::TriMesh open_grid(int nx, int ny);

/// Analytic side labels (1..6) for fss::make_test_cube(subdivision), in face
/// order: side = face / (2*subdivision^2) + 1.
std::vector<int> cube_side_labels(int subdivision);

}  // namespace fss_test
