#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "fss/affinity.hpp"
#include "fss/cluster.hpp"

namespace fss {

/// Moore-Penrose inverse via SVD; singular values below
/// max(rows,cols)*eps*sigma_max are treated as zero.
Eigen::MatrixXd pinv(const Eigen::MatrixXd& M);

/// Orthonormal basis of the column space of M under the same rank cutoff.
/// M pinv(M) == basis * basis^T, which is how the projections below apply it.
Eigen::MatrixXd pinv_projector_basis(const Eigen::MatrixXd& M);

/// Rank-k truncation of the eigendecomposition, eigenvalues taken as-is in
/// descending algebraic order (the affinity kernel is not guaranteed PSD;
/// negatives are reported, not hidden).
Eigen::MatrixXd best_rank_k(const Eigen::MatrixXd& W, int k);

struct NystromProjection {
    Eigen::MatrixXd F;                 // projection of W onto span(P^t N^k)
    Eigen::MatrixXd approximation;     // P^t [A B; B^t B^t A^{-1} B] P
    Eigen::MatrixXd pt_nk;             // the n x k matrix P^t N^k
};

/// Nystrom route: permute W into block form, eigendecompose the sample block
/// A, build the approximated eigenvector matrix N^k and project W onto its
/// column space. Throws when A is numerically singular.
NystromProjection nystrom_projection(const Eigen::MatrixXd& W, const std::vector<int>& sample);

/// Projection of W onto the span of its sampled columns, H^k = W^k (W^k)^+ W.
Eigen::MatrixXd fss_projection(const Eigen::MatrixXd& W, const std::vector<int>& sample);

struct LeverageProjection {
    Eigen::MatrixXd G;
    std::vector<double> scores;    // pi_j, sums to 1
    std::vector<int> columns;      // the k columns with the largest scores
};

/// Deterministic leverage-score column selection: scores from the top-k
/// singular directions, the k highest-score columns (ties by index) span the
/// projection space.
LeverageProjection leverage_projection(const Eigen::MatrixXd& W, int k);

struct ProjectionReport {
    int k = 0;
    double err_best = 0.0;
    double err_nystrom = 0.0;
    double err_leverage = 0.0;
    double err_fss = 0.0;
    double prop1_residual = 0.0;  // ||H^k - F^k||_F / ||W||_F
    double beta_k = 0.0;
    double gamma_k = 0.0;         // k-th singular value of W
};

struct ErrorCurveOptions {
    std::uint64_t sample_seed = 0;
    std::optional<int> first_face;
    int max_faces = 5000;
    KernelForm kernel = KernelForm::distance;
};

struct ErrorCurves {
    std::vector<ProjectionReport> reports;
    int negative_eigenvalues = 0;
    double sigma = 0.0;
    double w_norm = 0.0;
};

/// Fig.-style study: builds the full affinity matrix, one farthest sample
/// shared by the FSS and Nystrom routes, and for every k in the grid the four
/// rank-k approximation errors plus the beta/singular-value curves.
ErrorCurves error_curves(const TriMesh& mesh, const MetricSpec& metric,
                         const std::vector<int>& k_grid, const ErrorCurveOptions& opts = {},
                         const std::vector<double>* sdf_values = nullptr);

/// Same study on a prebuilt graph (used by tests and the acceptance suite).
ErrorCurves error_curves_graph(const DualGraph& graph, const std::vector<int>& k_grid,
                               const ErrorCurveOptions& opts = {});

void write_error_csv(const ErrorCurves& curves, const std::string& path);

}  // namespace fss
