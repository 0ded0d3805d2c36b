#pragma once

#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "capspec/errors.hpp"

namespace capspec {

inline constexpr double kPi = 3.14159265358979323846;

// Brent's method on a bracketing interval [a,b] with f(a)*f(b) <= 0.
double brent_root(const std::function<double(double)>& f, double a, double b,
                  double fa, double fb, double xtol, int max_iter = 200);

inline double brent_root(const std::function<double(double)>& f, double a, double b,
                         double xtol, int max_iter = 200) {
  return brent_root(f, a, b, f(a), f(b), xtol, max_iter);
}

// Golden-section minimizer of f on [a,b].
double golden_min(const std::function<double(double)>& f, double a, double b,
                  double xtol, int max_iter = 200);

// Gauss-Legendre nodes/weights on [-1,1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

// printf-style float formatting with a fixed number of significant digits;
// keeps CSV/JSON output byte-stable across runs.
inline std::string fmt_sig(double x, int digits = 15) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, x);
  return buf;
}

} // namespace capspec
