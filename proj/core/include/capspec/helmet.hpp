#pragma once

#include <iosfwd>
#include <optional>

#include "capspec/cap_eigen.hpp"

namespace capspec {

// First-order asymptotics for helmet domains H_{theta,eps}: a cap plus two
// orthogonal great-circle strips of half-width eps. The derivation behind the
// slope formulas is heuristic; reports carry an explicit flag.

// Dirichlet eigenvalue of the limiting strip graph: pi^2 / (4 (pi - theta)^2).
double graph_nu1(double theta);

// Root of (pi - theta) sqrt(mu1(B_theta)) - pi/2 on (0.5 pi, 0.7 pi).
double find_Theta_prime();
double Theta_prime_cached();

struct HelmetReport {
  double theta = 0.0;
  double nu1 = 0.0;
  double cap_slope = 0.0;     // d mu_1(B_theta(eps)) / d eps at 0, area-matched cap
  double helmet_slope = 0.0;  // d mu_1(H_theta,eps) / d eps at 0
  bool counterexample = false;
  bool valid = false;  // theta > Theta', so the cap branch is the first eigenvalue
  bool heuristic = true;
};

// cap_slope = 4 (pi-theta)(1/sin^2 theta - mu1) g(theta)^2,
// helmet_slope = 4 g(theta)^2 sqrt(mu1) cot(sqrt(mu1)(pi-theta));
// the comparison divides out g(theta)^2.
HelmetReport helmet_slopes(double theta);

// First crossing of helmet_slope - cap_slope above Theta, if any below pi - 1e-3.
std::optional<double> find_Theta_doubleprime();

// First-order values mu1 + eps * slope for both families.
struct HelmetAsymptote {
  double helmet_mu1 = 0.0;
  double cap_mu1 = 0.0;
};
HelmetAsymptote helmet_mu1_asymptote(double theta, double eps);

extern const char* kHelmetCsvHeader;
void write_helmet_csv_row(std::ostream& os, const HelmetReport& r);
void write_helmet_json(std::ostream& os, const HelmetReport& r);

} // namespace capspec
