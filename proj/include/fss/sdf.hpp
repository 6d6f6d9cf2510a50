#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fss/mesh.hpp"

namespace fss {

struct SdfConfig {
    double cone_half_angle_deg = 60.0;
    int rays_per_face = 30;
    std::uint64_t seed = 0;
    double outlier_sigma = 1.0;
    /// Brute-force ray casting up to this face count, AABB tree above it.
    int brute_force_max_faces = 20000;
};

/// Shape diameter per face: rays are cast from the barycenter into the cone
/// around the inward normal, each ray takes its first hit on the rest of the
/// mesh (grazing hits ignored), lengths beyond outlier_sigma standard
/// deviations from the median are discarded and the rest are averaged with
/// inverse-angle-from-axis weights. Requires a watertight mesh; throws naming
/// any face whose rays all miss. Deterministic for a fixed seed, with the RNG
/// split per face so the parallel schedule cannot change results.
std::vector<double> compute_sdf(const TriMesh& mesh, const FaceGeometry& geom,
                                const SdfConfig& cfg = {});

/// Reads one scalar per line; must have exactly expected_n finite values.
std::vector<double> load_sdf(const std::string& path, int expected_n);

void save_sdf(const std::vector<double>& values, const std::string& path);

}  // namespace fss
