#include "capspec/validate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <future>
#include <thread>

namespace capspec {

int thread_budget(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("CAPSPEC_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 2;
}

namespace {

// Runs fn(i) for i in [0, n) on up to `threads` workers; results by index.
template <typename F>
void run_indexed(int n, int threads, F&& fn) {
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::future<void>> pool;
  int next = 0;
  while (next < n || !pool.empty()) {
    while (next < n && static_cast<int>(pool.size()) < threads)
      pool.push_back(std::async(std::launch::async, fn, next++));
    pool.front().get();
    pool.erase(pool.begin());
  }
}

} // namespace

FitResult fit_eps2_slope(double theta, double t, double lambda,
                         const std::vector<double>& eps_list, double h_far,
                         double h_near_divisor, int threads, double tol,
                         std::uint64_t seed) {
  if (eps_list.size() < 3)
    throw DomainError("fit_eps2_slope: need at least 3 eps values");
  for (double e : eps_list)
    if (!(e >= 0.04) || !(e <= 0.2))
      throw DomainError("fit_eps2_slope: eps values must lie in [0.04, 0.2]");
  if (!(h_near_divisor >= 6.0))
    throw DomainError("fit_eps2_slope: h_near divisor must be >= 6");

  FitResult out;
  out.theta = theta;
  out.t = t;
  out.lambda = lambda;
  out.eps = eps_list;
  out.h_far = h_far;
  out.mu1.resize(eps_list.size());
  out.mu2.resize(eps_list.size());

  const CapEigen cap = CapEigen::compute(theta);
  out.ode_mu1 = cap.mu1();
  out.analytic_slope = four_hole_slope(cap, t, lambda).slope;

  const SurfaceMesh ref = mesh_cap(theta, h_far);
  out.ref_mu1 = cap_spectrum(ref, 2, tol, seed).eigenvalues[1];

  run_indexed(static_cast<int>(eps_list.size()), thread_budget(threads), [&](int i) {
    const double eps = eps_list[i];
    const double h_near = std::min(h_far, eps / h_near_divisor);
    const SurfaceMesh mesh = mesh_punctured_cap(theta, t, lambda, eps, h_far, h_near);
    const SpectrumResult sp = cap_spectrum(mesh, 2, tol, seed);
    out.mu1[i] = sp.eigenvalues[1];
    out.mu2[i] = sp.eigenvalues[2];
  });

  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < eps_list.size(); ++i) {
    const double x = eps_list[i] * eps_list[i];
    num += x * (out.mu1[i] - out.ref_mu1);
    den += x * x;
  }
  out.fitted_slope = num / den;
  return out;
}

HelmetSweepResult helmet_sweep(double eps, const std::vector<double>& theta_grid,
                               double h, int threads, double tol, std::uint64_t seed) {
  if (theta_grid.size() < 2) throw DomainError("helmet_sweep: need a theta grid");

  HelmetSweepResult out;
  out.eps = eps;
  out.h = h;
  out.points.resize(theta_grid.size());

  run_indexed(static_cast<int>(theta_grid.size()), thread_budget(threads), [&](int i) {
    const double theta = theta_grid[i];
    SweepPoint p;
    p.theta = theta;
    p.mu1_helmet = cap_spectrum(mesh_helmet(theta, eps, h), 1, tol, seed).eigenvalues[1];
    p.mu1_cap = cap_spectrum(mesh_cap(theta, h), 1, tol, seed).eigenvalues[1];
    out.points[i] = p;
  });

  // crossing intervals of d = mu1_helmet - mu1_cap, linearly interpolated
  auto d = [&](size_t i) { return out.points[i].mu1_helmet - out.points[i].mu1_cap; };
  auto cross = [&](size_t i) {
    const double x0 = out.points[i].theta, x1 = out.points[i + 1].theta;
    const double y0 = d(i), y1 = d(i + 1);
    return x0 - y0 * (x1 - x0) / (y1 - y0);
  };
  double open_at = 0.0;
  bool open = d(0) > 0.0;
  if (open) open_at = out.points.front().theta;
  for (size_t i = 0; i + 1 < out.points.size(); ++i) {
    const bool was = d(i) > 0.0, is = d(i + 1) > 0.0;
    if (!was && is) {
      open = true;
      open_at = cross(i);
    } else if (was && !is && open) {
      out.intervals.push_back({open_at, cross(i)});
      open = false;
    }
  }
  if (open) out.intervals.push_back({open_at, out.points.back().theta});

  // corner of the helmet branch: largest discrete curvature below 0.7 pi
  double best = 0.0;
  for (size_t i = 1; i + 1 < out.points.size(); ++i) {
    if (out.points[i].theta > 0.7 * kPi) continue;
    const double dx = out.points[i + 1].theta - out.points[i].theta;
    const double curv = std::abs(out.points[i + 1].mu1_helmet -
                                 2.0 * out.points[i].mu1_helmet +
                                 out.points[i - 1].mu1_helmet) /
                        (dx * dx);
    if (curv > best) {
      best = curv;
      out.corner_theta = out.points[i].theta;
    }
  }
  return out;
}

} // namespace capspec
