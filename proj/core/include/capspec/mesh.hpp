#pragma once

#include <array>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "capspec/errors.hpp"
#include "capspec/numerics.hpp"

namespace capspec {

// Triangulated subdomain of the unit sphere, flat triangles with vertices on
// the sphere, counterclockwise as seen from outside.
struct SurfaceMesh {
  std::vector<Eigen::Vector3d> vertices;
  std::vector<std::array<int, 3>> triangles;

  struct BoundaryEdge {
    int a = 0, b = 0;
    int tag = 0;  // 0 = outer rim, 1.. = holes / components
  };
  std::vector<BoundaryEdge> boundary_edges;
  double h = 0.0;  // target edge length the generator aimed for

  double area() const;                     // sum of flat-triangle areas
  double boundary_length(int tag) const;   // chord length of tagged edges
  int boundary_component_count() const;

  // Checks the structural invariants (unit vertices, nondegenerate triangles,
  // edge-manifoldness, consistent orientation, boundary bookkeeping); throws
  // GeometryError with a description on the first violation.
  void validate() const;

  void write_off(std::ostream& os) const;
};

// Conformal chart: stereographic projection from the antipode of `center`,
// scaled to unit Jacobian at the center. Pullback metric is rho * euclidean
// with rho(z) = (1 + |z|^2/4)^{-2}.
struct Chart {
  Eigen::Vector3d center, e1, e2;

  Eigen::Vector3d map(const Eigen::Vector2d& z) const {
    const double q = 0.25 * z.squaredNorm();
    return ((1.0 - q) * center + z[0] * e1 + z[1] * e2) / (1.0 + q);
  }
  Eigen::Vector2d inv(const Eigen::Vector3d& p) const {
    const double tc = p.dot(center);
    const double q = (1.0 - tc) / (1.0 + tc);
    const Eigen::Vector3d w = (1.0 + q) * (p - tc * center);
    return {w.dot(e1), w.dot(e2)};
  }
  double conformal_factor(const Eigen::Vector2d& z) const {
    const double q = 0.25 * z.squaredNorm();
    return 1.0 / ((1.0 + q) * (1.0 + q));
  }
};

// Chart at spherical coordinates (t, phi): e1 along the latitude circle
// (increasing phi), e2 up the longitude line (toward the cap center).
Chart chart_at(double t, double phi);

// Quasi-uniform cap of aperture theta (theta = pi gives the closed sphere).
SurfaceMesh mesh_cap(double theta, double h);

// Cap with four elliptical holes of scale eps at latitude t, longitudes j pi/2,
// long axis along the latitude. The aperture is enlarged to theta(eps) so the
// discrete area matches the discrete area of mesh_cap(theta, h_far).
SurfaceMesh mesh_punctured_cap(double theta, double t, double lambda, double eps,
                               double h_far, double h_near);

// Closed sphere with one hole at the south pole: an ellipse of scale eps in the
// chart (lambda > 1), or a unit disk when lambda is infinite.
SurfaceMesh mesh_sphere_with_hole(double eps, double lambda, double h_far,
                                  double h_near);

// Helmet domain: cap of aperture theta^eps plus the two orthogonal strips
// {|x1| < eps} and {|x2| < eps}, area-matched to |B_theta|.
SurfaceMesh mesh_helmet(double theta, double eps, double h);

// Aperture theta^eps < theta with |B_theta^eps ∪ strips| = |B_theta|.
double helmet_matched_aperture(double theta, double eps);

// Exact-on-the-sphere area of the chart image of the eps-scaled ellipse.
double hole_area_on_sphere(double eps, double semi_major, double semi_minor);

} // namespace capspec
