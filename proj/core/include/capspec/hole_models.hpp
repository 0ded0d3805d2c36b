#pragma once

#include <complex>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "capspec/errors.hpp"

namespace capspec {

// Ellipse of area pi from the Joukowski map T(z) = (lambda z + z^{-1}/lambda) / sqrt(lambda^2 - lambda^{-2}).
// lambda -> 1 degenerates to a slit, lambda -> infinity to the unit disk.
struct EllipseHole {
  double lambda = 0.0;
  double semi_major = 0.0;  // horizontal axis, sqrt((l + 1/l)/(l - 1/l))
  double semi_minor = 0.0;
  double area = 0.0;        // pi exactly
  double cap = 0.0;         // logarithmic capacity lambda / sqrt(lambda^2 - lambda^{-2})
  double c1 = 0.0;          // lambda^{-2}
  Eigen::Matrix2d M;        // virtual-mass matrix, diagonal for this family
};

EllipseHole ellipse_from_lambda(double lambda);

// <M e_angle, e_angle> = 2 pi cap^2 (1 - Re(c1 e^{-2 i angle})) for a simply
// connected hole with exterior map coefficients (cap, c1).
double virtual_mass_form(double cap, std::complex<double> c1, double angle);

// Closed parameterized curve, counterclockwise, enclosing the origin.
struct BoundaryCurve {
  std::vector<double> param;            // increasing in [0, 2pi)
  std::vector<Eigen::Vector2d> point;
  std::vector<Eigen::Vector2d> tangent; // dP/dparam
  std::vector<Eigen::Vector2d> second;  // d2P/dparam2; empty -> finite differences
};

BoundaryCurve ellipse_boundary(double lambda, int n = 256);
BoundaryCurve circle_boundary(double radius, int n = 256);
// CSV rows phi,x,y (header optional); tangents by periodic finite differences.
BoundaryCurve read_boundary_csv(std::istream& is);

// Decaying harmonic vector field W with dW/dnu = -nu on the boundary, expanded
// per Cartesian component in r^{-k}(a_k cos k phi + b_k sin k phi), k >= 1.
// The field is represented by a single-layer density on the boundary (Nystrom
// solve); the expansion coefficients are its complex moments, so they are valid
// wherever the far-field series converges (outside the curve's outer radius).
struct ExteriorSolution {
  BoundaryCurve boundary;
  int n_modes = 0;
  Eigen::MatrixXd coeff_a;  // 2 x n_modes
  Eigen::MatrixXd coeff_b;
  Eigen::Matrix2d M_est;    // from the k = 1 coefficients: W ~ M x / (2 pi |x|^2)
  double residual = 0.0;    // max collocation residual
  double condition = 0.0;
  Eigen::MatrixXd density;      // 2 x n nodes, single-layer density per component
  Eigen::VectorXd node_weight;  // arclength weights of the nodes
  std::vector<int> node_index;  // into boundary arrays
};

ExteriorSolution exterior_neumann_oracle(const BoundaryCurve& boundary,
                                         int n_modes = 32, int n_colloc = 256);

// Virtual mass via the Dirichlet-energy definition
//   M_pq = |omega| delta_pq + int_{R^2 \ omega} grad W_p . grad W_q,
// evaluated by annulus quadrature plus the analytic multipole tail.
Eigen::Matrix2d energy_virtual_mass(const ExteriorSolution& sol, double area);

// {"m11": ..., "m12": ..., "m22": ...}
void write_matrix_json(std::ostream& os, const Eigen::Matrix2d& M);

} // namespace capspec
