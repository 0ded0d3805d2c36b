#pragma once

#include <iosfwd>
#include <vector>

#include "capspec/errors.hpp"
#include "capspec/numerics.hpp"

namespace capspec {

// Radial Neumann eigenproblem on the spherical cap B_theta (unit sphere,
// aperture theta measured from the cap center). The first positive eigenvalue
// has the separated eigenfunctions g(t)cos(phi), g(t)sin(phi) where g solves
//
//   -(1/sin t) ((sin t) g')' + g / sin^2 t = mu g,   g ~ t near 0,  g'(theta) = 0.
//
// All angles in radians.

struct ProfileNode {
  double t;
  double g;
  double gp;    // g'
  double gpp;   // g'' from the equation, kept for dense evaluation
  double gppp;  // g''' from the differentiated equation
  double w;     // running integral of g^2 sin t from 0 to t
};

struct ShootResult {
  double g_end = 0.0;
  double gprime_end = 0.0;
  std::vector<ProfileNode> profile;  // accepted integrator nodes, last one at t = theta
};

// Integrates the radial equation from the regular series start at t0 out to
// theta; `extend_to` > theta appends nodes past the endpoint (same solution),
// used for finite differences at the boundary.
ShootResult shoot_radial(double mu, double theta, double extend_to = -1.0,
                         double t0 = 1e-4);

// Smallest mu > 0 with g'(theta) = 0 and g > 0 on (0, theta].
double mu1_of_cap(double theta);

// Normalized radial profile of the first eigenvalue: pi * int_0^theta g^2 sin = 1,
// so that g(t)cos(phi), g(t)sin(phi) are L2-orthonormal on B_theta.
class CapEigen {
public:
  static CapEigen compute(double theta);

  double theta() const { return theta_; }
  double mu1() const { return mu1_; }
  double norm() const { return norm_; }  // scaling applied to the raw shot

  double g(double t) const;
  double gprime(double t) const;

  const std::vector<ProfileNode>& grid() const { return grid_; }

  // CSV with header t,g,gprime at 15 significant digits.
  void write_csv(std::ostream& os) const;

private:
  double theta_ = 0.0, mu1_ = 0.0, norm_ = 1.0, t0_ = 1e-4;
  std::vector<ProfileNode> grid_;      // normalized, on (0, theta]
  std::vector<ProfileNode> extended_;  // a short continuation past theta
  friend struct GDerivsAccess;
};

struct CriticalAngles {
  double Theta = 0.0;        // mu1(B_Theta) sin^2(Theta) = 1
  double Theta_prime = 0.0;  // see helmet module; stored here as the cap-side quantity
  double bracket_tolerance = 1e-8;
};

// Root of mu1(B_theta) sin^2 theta - 1 on (0.6 pi, 0.8 pi).
double find_Theta();

// Cached value of find_Theta(); computed once per process.
double Theta_cached();

// For theta > Theta: the unique zero of g' in (pi/2, Theta).
double find_tmax(double theta);

struct GDerivs {
  double g2;  // finite-difference g''(Theta), expected ~ 0
  double g3;  // finite-difference g'''(Theta), expected -2 (cos T / sin^3 T) g(T) > 0
};

// Central finite differences (h = 1e-3, one Richardson pass) of the normalized
// profile at theta = Theta.
GDerivs g_derivatives_at_Theta();

} // namespace capspec
