#include <cmath>

#include "capspec/cap_eigen.hpp"
#include "capspec/fem.hpp"
#include "doctest.h"

using namespace capspec;

TEST_CASE("P1 assembly: partition of unity and mass consistency") {
  const SurfaceMesh mesh = mesh_cap(0.7 * kPi, 0.08);
  auto [K, M] = assemble_p1(mesh);

  const Eigen::SparseMatrix<double> Ks = K.to_sparse(), Ms = M.to_sparse();
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(K.n);
  CHECK((Ks * ones).lpNorm<Eigen::Infinity>() < 1e-12);
  CHECK(ones.dot(Ms * ones) == doctest::Approx(mesh.area()).epsilon(1e-12));
}

TEST_CASE("assembly rejects degenerate triangles") {
  SurfaceMesh bad;
  const Eigen::Vector3d p{0.0, 0.0, 1.0};
  bad.vertices = {p, p, p};
  bad.triangles = {{0, 1, 2}};
  CHECK_THROWS_AS(assemble_p1(bad), GeometryError);
}

TEST_CASE("full sphere: constant mode plus the triple eigenvalue 2") {
  const SurfaceMesh sphere = mesh_cap(kPi, 0.12);
  const SpectrumResult r = cap_spectrum(sphere, 4, 1e-9);

  CHECK(std::abs(r.eigenvalues[0]) < 1e-8 * r.eigenvalues[1]);
  for (int i = 1; i <= 3; ++i)
    CHECK(r.eigenvalues[i] == doctest::Approx(2.0).epsilon(0.03));
  CHECK(r.eigenvalues[4] > 4.0);  // next group sits near 6

  for (size_t i = 0; i < r.residuals.size(); ++i)
    CHECK(r.residuals[i] < 1e-8 * (1.0 + r.eigenvalues[i]));
}

TEST_CASE("hemisphere anchor and ODE cross-validation") {
  const SpectrumResult hemi = cap_spectrum(mesh_cap(kPi / 2, 0.05), 2);
  CHECK(hemi.eigenvalues[1] == doctest::Approx(2.0).epsilon(0.01));
  CHECK(hemi.eigenvalues[2] == doctest::Approx(2.0).epsilon(0.01));

  const double theta = 0.8 * kPi;
  const SpectrumResult big = cap_spectrum(mesh_cap(theta, 0.04), 2);
  CHECK(big.eigenvalues[1] == doctest::Approx(mu1_of_cap(theta)).epsilon(0.01));
}

TEST_CASE("O(h^2) convergence of the first cap eigenvalue") {
  const double exact = 2.0;
  const double e1 = std::abs(cap_spectrum(mesh_cap(kPi / 2, 0.10), 1).eigenvalues[1] - exact);
  const double e2 = std::abs(cap_spectrum(mesh_cap(kPi / 2, 0.05), 1).eigenvalues[1] - exact);
  const double slope = std::log(e1 / e2) / std::log(2.0);
  CHECK(slope > 1.7);
  CHECK(slope < 2.3);
}

TEST_CASE("determinism for a fixed seed") {
  const SurfaceMesh mesh = mesh_cap(0.6 * kPi, 0.1);
  const SpectrumResult a = cap_spectrum(mesh, 3, 1e-9, 7);
  const SpectrumResult b = cap_spectrum(mesh, 3, 1e-9, 7);
  for (size_t i = 0; i < a.eigenvalues.size(); ++i)
    CHECK(a.eigenvalues[i] == b.eigenvalues[i]);
}

TEST_CASE("symmetric punctured cap: near-degenerate leading pair") {
  const SurfaceMesh mesh = mesh_punctured_cap(0.8 * kPi, 2.07, 2.0, 0.12, 0.07, 0.015);
  const SpectrumResult r = cap_spectrum(mesh, 3, 1e-10);
  CHECK(std::abs(r.eigenvalues[1] - r.eigenvalues[2]) < 1e-7);
  // removing O(eps^2) area moves mu1 by O(eps^2)
  CHECK(std::abs(r.eigenvalues[1] - mu1_of_cap(0.8 * kPi)) < 0.1);
}
