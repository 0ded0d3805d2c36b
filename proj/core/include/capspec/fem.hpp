#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "capspec/mesh.hpp"

namespace capspec {

// Symmetric sparse matrix in triplet form (both triangles stored).
struct SparseSpd {
  int n = 0;
  std::vector<Eigen::Triplet<double>> triplets;

  Eigen::SparseMatrix<double> to_sparse() const {
    Eigen::SparseMatrix<double> s(n, n);
    s.setFromTriplets(triplets.begin(), triplets.end());
    return s;
  }
};

// Linear-element stiffness and mass on flat triangles with vertices on the
// sphere; Neumann boundary conditions are natural (no boundary terms).
std::pair<SparseSpd, SparseSpd> assemble_p1(const SurfaceMesh& mesh);

struct SpectrumResult {
  std::vector<double> eigenvalues;  // ascending, starting at ~0 (constants)
  std::vector<double> residuals;    // ||K u - lambda M u||_{M^{-1}} per pair
  double h = 0.0;
  Eigen::MatrixXd vectors;          // columns match `eigenvalues`
};

// k+1 smallest eigenpairs of K u = lambda M u by block inverse iteration with a
// unit spectral shift and Rayleigh-Ritz restarts; deterministic for fixed seed.
SpectrumResult neumann_spectrum(const SparseSpd& K, const SparseSpd& M, int k,
                                double tol = 1e-8, std::uint64_t seed = 42);

// Convenience: mesh -> assemble -> solve.
SpectrumResult cap_spectrum(const SurfaceMesh& mesh, int k, double tol = 1e-8,
                            std::uint64_t seed = 42);

} // namespace capspec
