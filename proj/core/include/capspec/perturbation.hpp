#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "capspec/cap_eigen.hpp"
#include "capspec/hole_models.hpp"

namespace capspec {

// One small hole in the eps^2 eigenvalue expansion: chart data at its center.
struct HoleDatum {
  double rho0 = 1.0;                      // conformal factor of the chart at 0
  double area = 0.0;                      // hole area in chart coordinates
  Eigen::Matrix2d M;                      // virtual-mass matrix in the chart frame
  std::vector<double> values;             // u_i at the hole center, i in the cluster
  std::vector<Eigen::Vector2d> gradients; // grad(u_i o psi)(0)
};

// Precomputed boundary integrals int (<grad u_i, grad u_j> - mu u_i u_j) <phi, nu>.
struct BoundaryTermDatum {
  Eigen::MatrixXd entries;  // |I| x |I| symmetric
};

struct Prop31Result {
  Eigen::MatrixXd matrix;
  std::vector<double> kappa;  // ascending eigenvalues
};

// entry(i,j) = boundary(i,j) + sum_n (rho0 mu area v_i v_j - <M grad_i, grad_j>),
// the second-order eigenvalue perturbation matrix for the cluster.
Prop31Result prop31_matrix(const std::vector<HoleDatum>& holes,
                           const BoundaryTermDatum& boundary, double mu);

struct PerturbationCertificate {
  double theta = 0.0;
  double t = 0.0;
  double lambda = 0.0;
  double slope = 0.0;  // d mu_1 / d(eps^2), i.e. 2 pi times the bracket in the slope formula
  bool positive = false;
  std::vector<double> kappa;
};

// Boundary term for the area-restoring aperture flow theta(eps): the cap grows
// so that removing four holes of area pi eps^2 each keeps |Omega^eps| = |B_theta|,
// giving the constant normal speed <phi, nu> = 2 / sin(theta) per unit eps^2.
BoundaryTermDatum cap_area_boundary_term(const CapEigen& cap);

// Hole data for the four ellipses at latitude t, longitudes j pi/2, long axis
// along the latitude direction; M may be overridden (tests perturb it).
std::vector<HoleDatum> four_hole_data(const CapEigen& cap, double t,
                                      const Eigen::Matrix2d& M);

// eps^2 slope of mu_1 for the four-hole configuration:
//   2 pi [ mu g(t)^2 - (M11/pi) g(t)^2/sin^2 t - (M22/pi) g'(t)^2
//          + (1/sin^2 theta - mu) g(theta)^2 ].
PerturbationCertificate four_hole_slope(const CapEigen& cap, double t, double lambda);
PerturbationCertificate four_hole_slope(double theta, double t, double lambda);

// For theta > Theta: t = t_max(theta) and the smallest grid lambda satisfying
// mu sin^2 t > 2/(1 + lambda^{-2}). For theta <= Theta: maximize the slope over
// (t, lambda) starting from the near-Theta ansatz, then polish locally.
PerturbationCertificate certify_counterexample(double theta);

struct DeltaScanResult {
  double delta_max = 0.0;
  bool failure_found = false;
  PerturbationCertificate endpoint;  // certificate at the first failing aperture
                                     // (or at the scan cap when none fails)
};

// Largest delta (multiple of step) with positive certificates on the grid
// (Theta - delta, Theta]; the scan stops at max_delta.
DeltaScanResult delta_scan(double step, double max_delta = 0.2 * kPi);

struct NearThetaTerms {
  double tau = 0.0;
  double eta = 0.0;        // -tau cot(Theta) > 0
  double lambda = 0.0;     // 1 + eta
  double predicted = 0.0;  // eta g(Theta)^2 / sin^2(Theta)
  double exact = 0.0;      // hole bracket evaluated through four_hole_slope
  double ratio = 0.0;      // exact / predicted -> 1 as tau -> 0
};

NearThetaTerms near_Theta_expansion(double tau);

struct SphereHoleAsymptote {
  double sum12 = 0.0;  // mu_1 + mu_2 = 4 - 3 cap^2 eps^2
  double mu3 = 0.0;    // 2 + (3 area / 2 pi) eps^2
};

SphereHoleAsymptote sphere_single_hole(const EllipseHole& hole, double eps);

// The sphere-with-one-hole instance of the perturbation matrix (cluster {1,2,3},
// coordinate eigenfunctions, hole at the south pole).
Prop31Result sphere_hole_prop31(const EllipseHole& hole);

void write_certificate_json(std::ostream& os, const PerturbationCertificate& c);
extern const char* kCertificateCsvHeader;
void write_certificate_csv_row(std::ostream& os, const PerturbationCertificate& c);

} // namespace capspec
