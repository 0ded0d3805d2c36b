#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "capspec/hole_models.hpp"
#include "capspec/mesh.hpp"
#include "doctest.h"

using namespace capspec;

namespace {

double cap_area(double theta) { return 2.0 * kPi * (1.0 - std::cos(theta)); }

bool vertex_set_has(const SurfaceMesh& m, const Eigen::Vector3d& p, double tol = 1e-12) {
  for (const auto& v : m.vertices)
    if ((v - p).norm() < tol) return true;
  return false;
}

} // namespace

TEST_CASE("chart: roundtrip, unit image, conformal factor") {
  const Chart c = chart_at(2.1, 0.7);
  CHECK(std::abs(c.e1.dot(c.e2)) < 1e-14);
  CHECK(std::abs(c.e1.norm() - 1.0) < 1e-14);
  CHECK(std::abs(c.center.norm() - 1.0) < 1e-14);

  for (const Eigen::Vector2d z : {Eigen::Vector2d(0.3, -0.2), Eigen::Vector2d(0.0, 0.0),
                                  Eigen::Vector2d(-0.8, 0.5)}) {
    const Eigen::Vector3d p = c.map(z);
    CHECK(std::abs(p.norm() - 1.0) < 1e-14);
    CHECK((c.inv(p) - z).norm() < 1e-12);
  }
  CHECK(c.map({0, 0}).isApprox(c.center, 1e-14));

  // area factor: chart disk of radius r covers a geodesic cap of radius 2 atan(r/2)
  const double r = 0.4;
  const double exact = cap_area(2.0 * std::atan(r / 2.0));
  CHECK(hole_area_on_sphere(r, 1.0, 1.0) == doctest::Approx(exact).epsilon(1e-6));
  CHECK(hole_area_on_sphere(r, 1.0, 1.0) ==
        doctest::Approx(kPi * r * r / (1.0 + r * r / 4.0)).epsilon(1e-12));
}

TEST_CASE("mesh_cap: areas, boundary, validity") {
  const SurfaceMesh hemi = mesh_cap(kPi / 2, 0.05);
  hemi.validate();
  CHECK(hemi.area() == doctest::Approx(2.0 * kPi).epsilon(0.02));
  CHECK(hemi.boundary_length(0) == doctest::Approx(2.0 * kPi).epsilon(0.02));

  const SurfaceMesh big = mesh_cap(0.8 * kPi, 0.05);
  big.validate();
  CHECK(big.area() == doctest::Approx(cap_area(0.8 * kPi)).epsilon(0.01));
  CHECK(big.boundary_length(0) ==
        doctest::Approx(2.0 * kPi * std::sin(0.8 * kPi)).epsilon(0.02));

  // O(h^2) area convergence
  const double e1 = std::abs(mesh_cap(0.7 * kPi, 0.08).area() - cap_area(0.7 * kPi));
  const double e2 = std::abs(mesh_cap(0.7 * kPi, 0.04).area() - cap_area(0.7 * kPi));
  CHECK(e2 < 0.5 * e1);

  CHECK_THROWS_AS(mesh_cap(-1.0, 0.1), DomainError);
  CHECK_THROWS_AS(mesh_cap(1.0, 0.9), DomainError);
  CHECK_THROWS_AS(mesh_cap(kPi, 1e-4), ResourceError);
}

TEST_CASE("mesh_cap: closed sphere at theta = pi") {
  const SurfaceMesh sphere = mesh_cap(kPi, 0.1);
  sphere.validate();
  CHECK(sphere.boundary_edges.empty());
  CHECK(sphere.area() == doctest::Approx(4.0 * kPi).epsilon(0.02));
}

TEST_CASE("mesh_punctured_cap: geometry and area matching") {
  const double theta = 0.8 * kPi, t = 2.07, lambda = 2.0, eps = 0.1;
  const SurfaceMesh ref = mesh_cap(theta, 0.05);
  const SurfaceMesh m = mesh_punctured_cap(theta, t, lambda, eps, 0.05, eps / 8.0);
  m.validate();

  CHECK(m.boundary_component_count() == 5);
  CHECK(std::abs(m.area() - ref.area()) < 0.02 * 0.05 * 0.05 + 1e-9);

  // each hole boundary approximates the chart ellipse perimeter
  const EllipseHole e = ellipse_from_lambda(lambda);
  double perim = 0.0;
  const int n = 4096;
  for (int i = 0; i < n; ++i) {
    const double s0 = 2.0 * kPi * i / n, s1 = 2.0 * kPi * (i + 1) / n;
    const Eigen::Vector2d p0{eps * e.semi_major * std::cos(s0), eps * e.semi_minor * std::sin(s0)};
    const Eigen::Vector2d p1{eps * e.semi_major * std::cos(s1), eps * e.semi_minor * std::sin(s1)};
    perim += (p1 - p0).norm();
  }
  for (int tag = 1; tag <= 4; ++tag)
    CHECK(m.boundary_length(tag) == doctest::Approx(perim).epsilon(0.02));

  // eps -> 0 degenerates to the plain cap
  const SurfaceMesh zero = mesh_punctured_cap(theta, t, lambda, 0.0, 0.05, 1e-3);
  CHECK(zero.triangles.size() == ref.triangles.size());

  CHECK_THROWS_AS(mesh_punctured_cap(theta, t, lambda, eps, 0.05, eps), DomainError);
  // holes that cannot fit: t close to the rim with huge eps
  CHECK_THROWS_AS(mesh_punctured_cap(0.6 * kPi, 0.59 * kPi, 2.0, 0.25, 0.05, 0.04),
                  GeometryError);
}

TEST_CASE("mesh_punctured_cap: exact 4-fold symmetry of the vertex set") {
  const SurfaceMesh m = mesh_punctured_cap(0.8 * kPi, 2.07, 2.0, 0.12, 0.06, 0.02);
  std::set<std::array<long long, 3>> keys;
  auto key = [](const Eigen::Vector3d& v) {
    return std::array<long long, 3>{static_cast<long long>(std::llround(v[0] * 1e13)),
                                    static_cast<long long>(std::llround(v[1] * 1e13)),
                                    static_cast<long long>(std::llround(v[2] * 1e13))};
  };
  for (const auto& v : m.vertices) keys.insert(key(v));
  size_t hits = 0;
  for (const auto& v : m.vertices)
    if (keys.count(key(Eigen::Vector3d(-v[1], v[0], v[2])))) ++hits;
  CHECK(hits == m.vertices.size());
}

TEST_CASE("mesh_sphere_with_hole: south-pole puncture") {
  const double eps = 0.15;
  const SurfaceMesh m = mesh_sphere_with_hole(eps, std::numeric_limits<double>::infinity(),
                                              0.06, eps / 8.0);
  m.validate();
  CHECK(m.boundary_component_count() >= 1);
  const double hole = kPi * eps * eps / (1.0 + eps * eps / 4.0);
  CHECK(m.area() == doctest::Approx(4.0 * kPi - hole).epsilon(0.01));
  CHECK(vertex_set_has(m, {0.0, 0.0, 1.0}));   // north pole kept
  CHECK(!vertex_set_has(m, {0.0, 0.0, -1.0})); // south pole removed
}

TEST_CASE("mesh_helmet: area match, notches, crossing at the south pole") {
  const double theta = 0.75 * kPi, eps = 0.08, h = 0.05;
  const SurfaceMesh m = mesh_helmet(theta, eps, h);
  m.validate();
  CHECK(m.area() == doctest::Approx(cap_area(theta)).epsilon(0.005));
  CHECK(m.boundary_component_count() == 4);
  CHECK(vertex_set_has(m, {0.0, 0.0, -1.0}));  // strips cross at the south pole

  const double te = helmet_matched_aperture(theta, eps);
  CHECK(te < theta);
  CHECK(helmet_matched_aperture(theta, 0.01) == doctest::Approx(theta).epsilon(0.01));

  CHECK_THROWS_AS(mesh_helmet(theta, 0.5, h), DomainError);
}

TEST_CASE("OFF export shape") {
  const SurfaceMesh m = mesh_cap(0.5 * kPi, 0.2);
  std::ostringstream os;
  m.write_off(os);
  const std::string text = os.str();
  CHECK(text.rfind("OFF\n", 0) == 0);
  std::istringstream is(text);
  std::string magic;
  size_t nv = 0, nf = 0, ne = 9;
  is >> magic >> nv >> nf >> ne;
  CHECK(nv == m.vertices.size());
  CHECK(nf == m.triangles.size());
}
