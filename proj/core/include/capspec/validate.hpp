#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "capspec/fem.hpp"
#include "capspec/perturbation.hpp"

namespace capspec {

// Thread budget for embarrassingly parallel sweeps: CAPSPEC_THREADS env var,
// else hardware concurrency; results are always reduced in index order.
int thread_budget(int requested = 0);

struct FitResult {
  double theta = 0.0, t = 0.0, lambda = 0.0;
  std::vector<double> eps;
  std::vector<double> mu1, mu2;  // punctured-cap FEM values per eps
  double ref_mu1 = 0.0;          // FEM reference cap at the same h
  double ode_mu1 = 0.0;
  double fitted_slope = 0.0;     // least squares of mu1(eps)-ref against eps^2, no intercept
  double analytic_slope = 0.0;   // four_hole_slope at (theta, t, lambda)
  double h_far = 0.0;
};

// Fits the eps^2 coefficient of mu_1(Omega^eps) - mu_1(B_theta) from FEM runs
// and reports it against the perturbation-matrix slope.
FitResult fit_eps2_slope(double theta, double t, double lambda,
                         const std::vector<double>& eps_list, double h_far,
                         double h_near_divisor = 6.0, int threads = 0,
                         double tol = 1e-9, std::uint64_t seed = 42);

struct SweepPoint {
  double theta = 0.0;
  double mu1_helmet = 0.0;
  double mu1_cap = 0.0;
};

struct HelmetSweepResult {
  double eps = 0.0, h = 0.0;
  std::vector<SweepPoint> points;
  // maximal intervals where the helmet beats the area-matched cap
  std::vector<std::pair<double, double>> intervals;
  std::optional<double> corner_theta;  // curvature spike of the helmet branch
};

HelmetSweepResult helmet_sweep(double eps, const std::vector<double>& theta_grid,
                               double h, int threads = 0, double tol = 1e-9,
                               std::uint64_t seed = 42);

} // namespace capspec
