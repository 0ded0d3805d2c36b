#include "capspec/fem.hpp"

#include <cmath>
#include <random>

#include <Eigen/SparseCholesky>

namespace capspec {

std::pair<SparseSpd, SparseSpd> assemble_p1(const SurfaceMesh& mesh) {
  const int n = static_cast<int>(mesh.vertices.size());
  SparseSpd K, M;
  K.n = M.n = n;
  K.triplets.reserve(9 * mesh.triangles.size());
  M.triplets.reserve(9 * mesh.triangles.size());

  for (size_t idx = 0; idx < mesh.triangles.size(); ++idx) {
    const auto& t = mesh.triangles[idx];
    const Eigen::Vector3d& p0 = mesh.vertices[t[0]];
    const Eigen::Vector3d& p1 = mesh.vertices[t[1]];
    const Eigen::Vector3d& p2 = mesh.vertices[t[2]];
    const double area = 0.5 * (p1 - p0).cross(p2 - p0).norm();
    if (!(area > 1e-16))
      throw GeometryError("assemble_p1: degenerate triangle " + std::to_string(idx));

    // edge opposite each vertex
    const Eigen::Vector3d e[3] = {p2 - p1, p0 - p2, p1 - p0};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        K.triplets.emplace_back(t[i], t[j], e[i].dot(e[j]) / (4.0 * area));
        M.triplets.emplace_back(t[i], t[j], area / (i == j ? 6.0 : 12.0));
      }
  }
  return {std::move(K), std::move(M)};
}

SpectrumResult neumann_spectrum(const SparseSpd& Kin, const SparseSpd& Min, int k,
                                double tol, std::uint64_t seed) {
  if (k < 1) throw DomainError("neumann_spectrum: k must be >= 1");
  const int n = Kin.n;
  const int want = k + 1;           // include the constant mode
  int block = std::min(n, k + 3);
  if (block < want)
    throw DomainError("neumann_spectrum: mesh too small for the requested count");

  const Eigen::SparseMatrix<double> K = Kin.to_sparse();
  const Eigen::SparseMatrix<double> M = Min.to_sparse();

  const double sigma = 1.0;  // K + sigma M is SPD (constants included)
  Eigen::SparseMatrix<double> S = K + sigma * M;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(S);
  if (solver.info() != Eigen::Success)
    throw ConvergenceError("neumann_spectrum: factorization of K + sigma M failed");
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> msolver(M);
  if (msolver.info() != Eigen::Success)
    throw ConvergenceError("neumann_spectrum: mass factorization failed");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd X(n, block);
  for (int j = 0; j < block; ++j)
    for (int i = 0; i < n; ++i) X(i, j) = gauss(rng);
  X.col(0).setOnes();  // seed the constant mode exactly

  Eigen::VectorXd prev = Eigen::VectorXd::Constant(want, 1e300);
  Eigen::VectorXd values(block);
  std::vector<double> resid(want, 1e300);

  const int max_iter = 300;
  for (int it = 0; it < max_iter; ++it) {
    // A degenerate eigenvalue group split by the block boundary stalls the
    // trailing pairs; widen the block and keep going.
    if (it > 0 && it % 50 == 0 && block < std::min(n, k + 15)) {
      const int extra = std::min(4, std::min(n, k + 15) - block);
      Eigen::MatrixXd wider(n, block + extra);
      wider.leftCols(block) = X;
      for (int j = block; j < block + extra; ++j)
        for (int i = 0; i < n; ++i) wider(i, j) = gauss(rng);
      block += extra;
      X = std::move(wider);
      values.resize(block);
    }
    // M-orthonormalize by the small Cholesky of X^T M X
    Eigen::MatrixXd G = X.transpose() * (M * X);
    Eigen::LLT<Eigen::MatrixXd> llt(0.5 * (G + G.transpose()));
    if (llt.info() == Eigen::Success) {
      X = llt.matrixL().solve(X.transpose()).transpose();
    } else {
      // re-seed the offending block deterministically
      for (int j = 0; j < block; ++j)
        for (int i = 0; i < n; ++i) X(i, j) = gauss(rng);
    }

    // inverse iteration step + Rayleigh-Ritz in the new basis
    const Eigen::MatrixXd Y = solver.solve(M * X);
    const Eigen::MatrixXd Ks = Y.transpose() * (K * Y);
    const Eigen::MatrixXd Ms = Y.transpose() * (M * Y);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(
        0.5 * (Ks + Ks.transpose()), 0.5 * (Ms + Ms.transpose()));
    if (es.info() != Eigen::Success)
      throw ConvergenceError("neumann_spectrum: dense Rayleigh-Ritz solve failed");
    values = es.eigenvalues();
    X = Y * es.eigenvectors();

    bool done = true;
    for (int j = 0; j < want; ++j) {
      const Eigen::VectorXd x = X.col(j);
      const double xm = std::sqrt(x.dot(M * x));
      const Eigen::VectorXd r = K * x - values(j) * (M * x);
      resid[j] = std::sqrt(std::max(0.0, r.dot(msolver.solve(r)))) / xm;
      if (resid[j] > tol * (1.0 + std::abs(values(j)))) done = false;
      if (std::abs(values(j) - prev(j)) > tol * (1.0 + std::abs(values(j)))) done = false;
    }
    prev = values.head(want);
    if (done && it >= 2) {
      SpectrumResult out;
      out.eigenvalues.assign(values.data(), values.data() + want);
      out.residuals = resid;
      out.vectors = X.leftCols(want);
      for (int j = 0; j < want; ++j) {
        const double nm = std::sqrt(X.col(j).dot(M * X.col(j)));
        out.vectors.col(j) /= nm;
      }
      return out;
    }
  }
  std::string msg = "neumann_spectrum: no convergence after 200 iterations; residuals:";
  for (int j = 0; j < want; ++j) msg += " " + fmt_sig(resid[j], 3);
  throw ConvergenceError(msg);
}

SpectrumResult cap_spectrum(const SurfaceMesh& mesh, int k, double tol,
                            std::uint64_t seed) {
  auto [K, M] = assemble_p1(mesh);
  SpectrumResult r = neumann_spectrum(K, M, k, tol, seed);
  r.h = mesh.h;
  return r;
}

} // namespace capspec
