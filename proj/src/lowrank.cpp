#include "fss/lowrank.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>

#include "fss/common.hpp"

namespace fss {

namespace {

double rank_cutoff(const Eigen::MatrixXd& M, double sigma_max) {
    return std::max(M.rows(), M.cols()) * std::numeric_limits<double>::epsilon() * sigma_max;
}

// Eigenpairs of a symmetric matrix sorted by descending algebraic value.
struct SortedEigen {
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;
};

SortedEigen sorted_eigh(const Eigen::MatrixXd& W) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(W);
    if (solver.info() != Eigen::Success) fail("lowrank_lab: eigendecomposition failed");
    const int n = static_cast<int>(W.rows());
    SortedEigen out;
    out.values.resize(n);
    out.vectors.resize(n, n);
    for (int i = 0; i < n; ++i) {  // Eigen returns ascending order
        out.values(i) = solver.eigenvalues()(n - 1 - i);
        out.vectors.col(i) = solver.eigenvectors().col(n - 1 - i);
    }
    return out;
}

std::vector<int> complement_of(const std::vector<int>& sample, int n) {
    std::vector<char> in_sample(n, 0);
    for (int j : sample) {
        if (j < 0 || j >= n) fail("lowrank_lab: sample index out of range");
        if (in_sample[j]) fail("lowrank_lab: repeated sample index " + std::to_string(j));
        in_sample[j] = 1;
    }
    std::vector<int> comp;
    comp.reserve(n - sample.size());
    for (int i = 0; i < n; ++i)
        if (!in_sample[i]) comp.push_back(i);
    return comp;
}

Eigen::MatrixXd columns_at(const Eigen::MatrixXd& W, const std::vector<int>& idx) {
    Eigen::MatrixXd M(W.rows(), idx.size());
    for (std::size_t j = 0; j < idx.size(); ++j) M.col(j) = W.col(idx[j]);
    return M;
}

}  // namespace

Eigen::MatrixXd pinv(const Eigen::MatrixXd& M) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& s = svd.singularValues();
    const double cutoff = rank_cutoff(M, s.size() > 0 ? s(0) : 0.0);
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(s.size());
    for (int i = 0; i < s.size(); ++i)
        if (s(i) > cutoff) inv(i) = 1.0 / s(i);
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

Eigen::MatrixXd pinv_projector_basis(const Eigen::MatrixXd& M) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinU);
    const auto& s = svd.singularValues();
    const double cutoff = rank_cutoff(M, s.size() > 0 ? s(0) : 0.0);
    int rank = 0;
    while (rank < s.size() && s(rank) > cutoff) ++rank;
    return svd.matrixU().leftCols(rank);
}

Eigen::MatrixXd best_rank_k(const Eigen::MatrixXd& W, int k) {
    const int n = static_cast<int>(W.rows());
    if (k < 0 || k > n) fail("lowrank_lab: rank " + std::to_string(k) + " out of range");
    const SortedEigen eig = sorted_eigh(W);
    return eig.vectors.leftCols(k) * eig.values.head(k).asDiagonal() *
           eig.vectors.leftCols(k).transpose();
}

NystromProjection nystrom_projection(const Eigen::MatrixXd& W, const std::vector<int>& sample) {
    const int n = static_cast<int>(W.rows());
    const int k = static_cast<int>(sample.size());
    if (k == 0) fail("lowrank_lab: empty sample");
    const std::vector<int> comp = complement_of(sample, n);

    Eigen::MatrixXd A(k, k);
    for (int r = 0; r < k; ++r)
        for (int c = 0; c < k; ++c) A(r, c) = W(sample[r], sample[c]);
    Eigen::MatrixXd B(k, static_cast<int>(comp.size()));
    for (int r = 0; r < k; ++r)
        for (std::size_t c = 0; c < comp.size(); ++c) B(r, c) = W(sample[r], comp[c]);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig_a(A);
    if (eig_a.info() != Eigen::Success) fail("lowrank_lab: eigendecomposition of A failed");
    const Eigen::VectorXd lam = eig_a.eigenvalues();
    const double lam_max = lam.cwiseAbs().maxCoeff();
    if (lam_max == 0.0 || lam.cwiseAbs().minCoeff() < 1e-12 * lam_max)
        fail("lowrank_lab: sample block A is numerically singular; choose a different sample");

    // N^k = [U_A; B^t U_A Lambda_A^{-1}], rows scattered back by the
    // permutation (sample first, complement after).
    const Eigen::MatrixXd ua = eig_a.eigenvectors();
    const Eigen::MatrixXd bottom = B.transpose() * ua * lam.cwiseInverse().asDiagonal();
    NystromProjection out;
    out.pt_nk.resize(n, k);
    for (int r = 0; r < k; ++r) out.pt_nk.row(sample[r]) = ua.row(r);
    for (std::size_t r = 0; r < comp.size(); ++r) out.pt_nk.row(comp[r]) = bottom.row(r);

    const Eigen::MatrixXd basis = pinv_projector_basis(out.pt_nk);
    out.F = basis * (basis.transpose() * W);

    // The Nystrom matrix approximation replaces only the complement-complement
    // block with B^t A^{-1} B.
    const Eigen::MatrixXd c_approx = B.transpose() * (ua * lam.cwiseInverse().asDiagonal() * ua.transpose()) * B;
    out.approximation.resize(n, n);
    for (int r = 0; r < k; ++r)
        for (int c = 0; c < k; ++c) out.approximation(sample[r], sample[c]) = A(r, c);
    for (int r = 0; r < k; ++r)
        for (std::size_t c = 0; c < comp.size(); ++c) {
            out.approximation(sample[r], comp[c]) = B(r, c);
            out.approximation(comp[c], sample[r]) = B(r, c);
        }
    for (std::size_t r = 0; r < comp.size(); ++r)
        for (std::size_t c = 0; c < comp.size(); ++c)
            out.approximation(comp[r], comp[c]) = c_approx(r, c);
    return out;
}

Eigen::MatrixXd fss_projection(const Eigen::MatrixXd& W, const std::vector<int>& sample) {
    if (sample.empty()) fail("lowrank_lab: empty sample");
    complement_of(sample, static_cast<int>(W.rows()));  // validates indices
    const Eigen::MatrixXd wk = columns_at(W, sample);
    const Eigen::MatrixXd basis = pinv_projector_basis(wk);
    return basis * (basis.transpose() * W);
}

LeverageProjection leverage_projection(const Eigen::MatrixXd& W, int k) {
    const int n = static_cast<int>(W.rows());
    if (k < 1 || k > n) fail("lowrank_lab: k out of range");
    // For symmetric W the right singular vectors are the eigenvectors and the
    // singular values are |lambda|, so one symmetric eigendecomposition
    // (sorted by magnitude) serves as the SVD.
    const SortedEigen eig = sorted_eigh(W);
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return std::abs(eig.values(a)) > std::abs(eig.values(b));
    });

    LeverageProjection out;
    out.scores.assign(n, 0.0);
    for (int i = 0; i < k; ++i) {
        const auto v = eig.vectors.col(order[i]);
        for (int j = 0; j < n; ++j) out.scores[j] += v(j) * v(j) / k;
    }

    std::vector<int> by_score(n);
    std::iota(by_score.begin(), by_score.end(), 0);
    std::stable_sort(by_score.begin(), by_score.end(),
                     [&](int a, int b) { return out.scores[a] > out.scores[b]; });
    out.columns.assign(by_score.begin(), by_score.begin() + k);

    const Eigen::MatrixXd ck = columns_at(W, out.columns);
    const Eigen::MatrixXd basis = pinv_projector_basis(ck);
    out.G = basis * (basis.transpose() * W);
    return out;
}

ErrorCurves error_curves_graph(const DualGraph& graph, const std::vector<int>& k_grid,
                               const ErrorCurveOptions& opts) {
    const int n = graph.n();
    if (n > opts.max_faces)
        fail("lowrank_lab: " + std::to_string(n) + " faces exceeds the lab guard of " +
             std::to_string(opts.max_faces));
    std::vector<int> grid = k_grid;
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    if (grid.empty() || grid.front() < 1 || grid.back() > n)
        fail("lowrank_lab: k grid must lie in [1," + std::to_string(n) + "]");

    FullAffinityOptions wopts;
    wopts.max_faces = opts.max_faces;
    wopts.kernel = opts.kernel;
    const FullAffinity full = build_full_w(graph, wopts);

    const FirstFace first = opts.first_face ? FirstFace::at(*opts.first_face)
                                            : FirstFace::random(opts.sample_seed);
    const FarthestSample sample = sample_fixed_k(graph, grid.back(), first);

    const SortedEigen eig = sorted_eigh(full.W);
    Eigen::VectorXd gamma = eig.values.cwiseAbs();
    std::sort(gamma.data(), gamma.data() + gamma.size(), std::greater<double>());

    ErrorCurves out;
    out.sigma = full.sigma;
    out.w_norm = full.W.norm();
    out.negative_eigenvalues = static_cast<int>((eig.values.array() < 0.0).count());
    out.reports.resize(grid.size());

    for (std::size_t gi = 0; gi < grid.size(); ++gi) {
        const int k = grid[gi];
        ProjectionReport rep;
        rep.k = k;
        rep.beta_k = sample.betas[k - 1];
        rep.gamma_k = gamma(k - 1);

        const Eigen::MatrixXd ek = eig.vectors.leftCols(k) * eig.values.head(k).asDiagonal() *
                                   eig.vectors.leftCols(k).transpose();
        rep.err_best = (full.W - ek).norm();

        const std::vector<int> idx(sample.indices.begin(), sample.indices.begin() + k);
        const Eigen::MatrixXd hk = fss_projection(full.W, idx);
        rep.err_fss = (full.W - hk).norm();

        const NystromProjection nys = nystrom_projection(full.W, idx);
        rep.err_nystrom = (full.W - nys.approximation).norm();
        rep.prop1_residual = (hk - nys.F).norm() / out.w_norm;

        const LeverageProjection lev = leverage_projection(full.W, k);
        rep.err_leverage = (full.W - lev.G).norm();

        out.reports[gi] = rep;
    }
    return out;
}

ErrorCurves error_curves(const TriMesh& mesh, const MetricSpec& metric,
                         const std::vector<int>& k_grid, const ErrorCurveOptions& opts,
                         const std::vector<double>* sdf_values) {
    const FaceGeometry geom = face_geometry(mesh);
    const DualGraph graph = build_dual_graph(mesh, geom, metric, sdf_values);
    return error_curves_graph(graph, k_grid, opts);
}

void write_error_csv(const ErrorCurves& curves, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail("lowrank_lab: cannot write " + path);
    out << "k,err_best,err_nystrom,err_leverage,err_fss,prop1_residual,beta_k,gamma_k\n";
    char buf[256];
    for (const auto& r : curves.reports) {
        std::snprintf(buf, sizeof(buf), "%d,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g\n", r.k,
                      r.err_best, r.err_nystrom, r.err_leverage, r.err_fss, r.prop1_residual,
                      r.beta_k, r.gamma_k);
        out << buf;
    }
}

}  // namespace fss
