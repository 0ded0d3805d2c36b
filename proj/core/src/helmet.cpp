#include "capspec/helmet.hpp"

#include <cmath>
#include <limits>
#include <mutex>
#include <ostream>

namespace capspec {

double graph_nu1(double theta) {
  if (!(theta > 0.0) || !(theta < kPi))
    throw DomainError("graph_nu1: theta must lie in (0, pi)");
  const double d = kPi - theta;
  return kPi * kPi / (4.0 * d * d);
}

double find_Theta_prime() {
  auto f = [](double th) { return (kPi - th) * std::sqrt(mu1_of_cap(th)) - kPi / 2; };
  const double a = 0.5 * kPi, b = 0.7 * kPi;
  const double fa = f(a), fb = f(b);
  if (fa * fb > 0.0)
    throw ConvergenceError("find_Theta_prime: no sign change on (0.5 pi, 0.7 pi)");
  return brent_root(f, a, b, fa, fb, 1e-10);
}

double Theta_prime_cached() {
  static double value = 0.0;
  static std::once_flag flag;
  std::call_once(flag, [] { value = find_Theta_prime(); });
  return value;
}

HelmetReport helmet_slopes(double theta) {
  if (!(theta > 0.0) || !(theta < kPi))
    throw DomainError("helmet_slopes: theta must lie in (0, pi)");

  const CapEigen cap = CapEigen::compute(theta);
  const double mu = cap.mu1(), g2 = cap.g(theta) * cap.g(theta);
  const double s = std::sin(theta), d = kPi - theta;

  HelmetReport r;
  r.theta = theta;
  r.nu1 = graph_nu1(theta);
  r.valid = r.nu1 > mu;  // equivalent to theta > Theta'

  const double arg = std::sqrt(mu) * d;
  if (std::abs(std::sin(arg)) < 1e-6) {
    // cotangent pole: the strip branch crosses, the expansion breaks down
    r.valid = false;
    r.cap_slope = 4.0 * d * (1.0 / (s * s) - mu) * g2;
    r.helmet_slope = std::numeric_limits<double>::infinity();
    r.counterexample = false;
    return r;
  }

  r.cap_slope = 4.0 * d * (1.0 / (s * s) - mu) * g2;
  r.helmet_slope = 4.0 * g2 * std::sqrt(mu) * std::cos(arg) / std::sin(arg);
  // g(theta)^2 cancels in the comparison
  r.counterexample =
      std::sqrt(mu) * std::cos(arg) / std::sin(arg) > d * (1.0 / (s * s) - mu);
  return r;
}

std::optional<double> find_Theta_doubleprime() {
  const double Theta = Theta_cached();
  auto diff = [](double th) {
    const HelmetReport r = helmet_slopes(th);
    return r.helmet_slope - r.cap_slope;
  };
  const double hi = kPi - 1e-3, lo = Theta + 1e-4;
  double a = lo, fa = diff(a);
  const int n = 400;
  for (int i = 1; i <= n; ++i) {
    const double b = lo + (hi - lo) * i / n;
    const double fb = diff(b);
    if (fa > 0.0 && fb <= 0.0) return brent_root(diff, a, b, fa, fb, 1e-8);
    a = b;
    fa = fb;
  }
  return std::nullopt;
}

HelmetAsymptote helmet_mu1_asymptote(double theta, double eps) {
  if (!(eps >= 0.0)) throw DomainError("helmet_mu1_asymptote: eps must be >= 0");
  const HelmetReport r = helmet_slopes(theta);
  const double mu = mu1_of_cap(theta);
  return {mu + eps * r.helmet_slope, mu + eps * r.cap_slope};
}

const char* kHelmetCsvHeader = "theta,nu1,cap_slope,helmet_slope,counterexample,valid";

void write_helmet_csv_row(std::ostream& os, const HelmetReport& r) {
  os << fmt_sig(r.theta) << "," << fmt_sig(r.nu1) << "," << fmt_sig(r.cap_slope) << ","
     << fmt_sig(r.helmet_slope) << "," << (r.counterexample ? 1 : 0) << ","
     << (r.valid ? 1 : 0) << "\n";
}

void write_helmet_json(std::ostream& os, const HelmetReport& r) {
  os << "{ \"theta\": " << fmt_sig(r.theta) << ", \"nu1\": " << fmt_sig(r.nu1)
     << ", \"cap_slope\": " << fmt_sig(r.cap_slope)
     << ", \"helmet_slope\": " << fmt_sig(r.helmet_slope)
     << ", \"counterexample\": " << (r.counterexample ? "true" : "false")
     << ", \"valid\": " << (r.valid ? "true" : "false") << ", \"heuristic\": true }";
}

} // namespace capspec
