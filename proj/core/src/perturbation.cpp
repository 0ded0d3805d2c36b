#include "capspec/perturbation.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace capspec {

Prop31Result prop31_matrix(const std::vector<HoleDatum>& holes,
                           const BoundaryTermDatum& boundary, double mu) {
  if (!(mu > 0.0)) throw DomainError("prop31_matrix: mu must be positive");
  const Eigen::Index m = boundary.entries.rows();
  if (boundary.entries.cols() != m)
    throw DomainError("prop31_matrix: boundary term must be square");
  for (const auto& h : holes)
    if (static_cast<Eigen::Index>(h.values.size()) != m ||
        static_cast<Eigen::Index>(h.gradients.size()) != m)
      throw DomainError("prop31_matrix: hole cluster size mismatch");

  Eigen::MatrixXd A = boundary.entries;
  for (const auto& h : holes)
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < m; ++j)
        A(i, j) += h.rho0 * mu * h.area * h.values[i] * h.values[j] -
                   h.gradients[i].dot(h.M * h.gradients[j]);

  Prop31Result r;
  r.matrix = 0.5 * (A + A.transpose().eval());
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(r.matrix);
  r.kappa.assign(es.eigenvalues().data(), es.eigenvalues().data() + m);
  return r;
}

BoundaryTermDatum cap_area_boundary_term(const CapEigen& cap) {
  const double theta = cap.theta(), mu = cap.mu1();
  const double g = cap.g(theta), s = std::sin(theta);
  BoundaryTermDatum b;
  b.entries = Eigen::MatrixXd::Zero(2, 2);
  const double diag = 2.0 * kPi * g * g * (1.0 / (s * s) - mu);
  b.entries(0, 0) = diag;
  b.entries(1, 1) = diag;
  return b;
}

std::vector<HoleDatum> four_hole_data(const CapEigen& cap, double t,
                                      const Eigen::Matrix2d& M) {
  const double g = cap.g(t), gp = cap.gprime(t), s = std::sin(t);
  std::vector<HoleDatum> holes(4);
  for (int j = 0; j < 4; ++j) {
    const double c = std::cos(j * kPi / 2), sn = std::sin(j * kPi / 2);
    HoleDatum& h = holes[j];
    h.rho0 = 1.0;
    h.area = kPi;
    h.M = M;
    h.values = {g * c, g * sn};
    // chart frame: e1 along the latitude circle, e2 up the longitude line
    h.gradients = {Eigen::Vector2d(-g * sn / s, -gp * c),
                   Eigen::Vector2d(g * c / s, -gp * sn)};
  }
  return holes;
}

PerturbationCertificate four_hole_slope(const CapEigen& cap, double t, double lambda) {
  const double theta = cap.theta();
  if (!(t > 0.0) || !(t < theta))
    throw DomainError("four_hole_slope: need 0 < t < theta");
  if (!(lambda > 1.0)) throw DomainError("four_hole_slope: need lambda > 1");

  const EllipseHole ell = ellipse_from_lambda(lambda);
  const double mu = cap.mu1();
  const double g = cap.g(t), gp = cap.gprime(t);
  const double st = std::sin(t), sth = std::sin(theta), gth = cap.g(theta);

  PerturbationCertificate c;
  c.theta = theta;
  c.t = t;
  c.lambda = lambda;
  c.slope = 2.0 * kPi *
            (mu * g * g - (ell.M(0, 0) / kPi) * g * g / (st * st) -
             (ell.M(1, 1) / kPi) * gp * gp + (1.0 / (sth * sth) - mu) * gth * gth);
  c.positive = c.slope > 0.0;

  const Prop31Result pr =
      prop31_matrix(four_hole_data(cap, t, ell.M), cap_area_boundary_term(cap), mu);
  c.kappa = pr.kappa;
  return c;
}

PerturbationCertificate four_hole_slope(double theta, double t, double lambda) {
  if (!(theta > 0.0) || !(theta < kPi))
    throw DomainError("four_hole_slope: theta must lie in (0, pi)");
  return four_hole_slope(CapEigen::compute(theta), t, lambda);
}

namespace {

// lambda grid of the certificate search, ascending.
std::vector<double> lambda_grid() {
  std::vector<double> g;
  for (int k = 14; k >= 1; --k) g.push_back(1.0 + std::pow(2.0, -k));
  g.push_back(2.0);
  g.push_back(4.0);
  return g;
}

} // namespace

PerturbationCertificate certify_counterexample(double theta) {
  if (!(theta > 0.0) || !(theta < kPi))
    throw DomainError("certify_counterexample: theta must lie in (0, pi)");
  const double Theta = Theta_cached();
  const CapEigen cap = CapEigen::compute(theta);
  const double mu = cap.mu1();

  if (theta > Theta) {
    const double t = find_tmax(theta);
    const double lhs = mu * std::sin(t) * std::sin(t);
    for (double l : lambda_grid())
      if (lhs > 2.0 / (1.0 + 1.0 / (l * l))) return four_hole_slope(cap, t, l);
    // mu sin^2 t > 1 for t < Theta, so the first grid point always qualifies;
    // reaching this means the bracket failed upstream.
    throw ConvergenceError("certify_counterexample: no admissible lambda on the grid");
  }

  // theta <= Theta: scan the near-Theta ansatz t = theta - tau, eta = -tau cot(theta),
  // joined with the lambda grid, then polish by coordinate descent.
  auto slope_at = [&](double t, double l) {
    if (!(t > 0.0) || !(t < theta) || !(l > 1.0)) return -1e300;
    return four_hole_slope(cap, t, l).slope;
  };

  double best_t = 0.5 * theta, best_l = 1.5;
  double best = slope_at(best_t, best_l);
  const double cot = std::cos(theta) / std::sin(theta);
  for (int i = 0; i < 25; ++i) {
    const double tau = 1e-4 * std::pow(2000.0, i / 24.0);  // log grid up to 0.2
    const double t = theta - tau;
    if (!(t > 0.0)) continue;
    std::vector<double> cands = lambda_grid();
    const double eta = -tau * cot;
    if (eta > 0.0) cands.push_back(1.0 + eta);
    for (double l : cands) {
      const double s = slope_at(t, l);
      if (s > best) {
        best = s;
        best_t = t;
        best_l = l;
      }
    }
  }

  for (int round = 0; round < 3; ++round) {
    const double tl = std::max(1e-4, best_t - 0.1), tr = std::min(theta - 1e-9, best_t + 0.1);
    best_t = golden_min([&](double t) { return -slope_at(t, best_l); }, tl, tr, 1e-6);
    const double ll = std::max(1.0 + 1e-7, best_l * 0.5), lr = best_l * 2.0 + 0.1;
    best_l = golden_min([&](double l) { return -slope_at(best_t, l); }, ll, lr, 1e-6);
  }
  return four_hole_slope(cap, best_t, best_l);
}

DeltaScanResult delta_scan(double step, double max_delta) {
  if (!(step > 0.0)) throw DomainError("delta_scan: step must be positive");
  const double Theta = Theta_cached();

  DeltaScanResult r;
  r.endpoint = certify_counterexample(Theta);
  if (!r.endpoint.positive) return r;  // delta_max = 0, fails at Theta itself

  for (int k = 1; k * step <= max_delta; ++k) {
    const double theta = Theta - k * step;
    if (!(theta > 0.0)) break;
    const PerturbationCertificate c = certify_counterexample(theta);
    if (!c.positive) {
      r.failure_found = true;
      r.endpoint = c;
      r.delta_max = (k - 1) * step;
      return r;
    }
    r.endpoint = c;
    r.delta_max = k * step;
  }
  return r;
}

NearThetaTerms near_Theta_expansion(double tau) {
  if (!(tau > 0.0) || !(tau < 0.1))
    throw DomainError("near_Theta_expansion: need 0 < tau < 0.1");
  const double Theta = Theta_cached();
  const CapEigen cap = CapEigen::compute(Theta);

  NearThetaTerms out;
  out.tau = tau;
  out.eta = -tau * std::cos(Theta) / std::sin(Theta);
  out.lambda = 1.0 + out.eta;

  const double s = std::sin(Theta), g = cap.g(Theta);
  out.predicted = out.eta * g * g / (s * s);

  const PerturbationCertificate c = four_hole_slope(cap, Theta - tau, out.lambda);
  // Remove the area-restoring term to isolate the hole bracket; at Theta it
  // vanishes up to the root-finding tolerance anyway.
  const double boundary = (1.0 / (s * s) - cap.mu1()) * g * g;
  out.exact = c.slope / (2.0 * kPi) - boundary;
  out.ratio = out.exact / out.predicted;
  return out;
}

SphereHoleAsymptote sphere_single_hole(const EllipseHole& hole, double eps) {
  if (!(eps >= 0.0)) throw DomainError("sphere_single_hole: eps must be >= 0");
  SphereHoleAsymptote a;
  a.sum12 = 4.0 - 3.0 * hole.cap * hole.cap * eps * eps;
  a.mu3 = 2.0 + (3.0 * hole.area / (2.0 * kPi)) * eps * eps;
  return a;
}

Prop31Result sphere_hole_prop31(const EllipseHole& hole) {
  const double c = std::sqrt(3.0 / (4.0 * kPi));  // L2-normalized coordinate functions
  HoleDatum h;
  h.rho0 = 1.0;
  h.area = hole.area;
  h.M = hole.M;
  h.values = {0.0, 0.0, -c};
  h.gradients = {Eigen::Vector2d(c, 0.0), Eigen::Vector2d(0.0, c), Eigen::Vector2d(0.0, 0.0)};
  BoundaryTermDatum none;
  none.entries = Eigen::MatrixXd::Zero(3, 3);
  return prop31_matrix({h}, none, 2.0);
}

void write_certificate_json(std::ostream& os, const PerturbationCertificate& c) {
  os << "{ \"theta\": " << fmt_sig(c.theta) << ", \"t\": " << fmt_sig(c.t)
     << ", \"lambda\": " << fmt_sig(c.lambda) << ", \"slope\": " << fmt_sig(c.slope)
     << ", \"positive\": " << (c.positive ? "true" : "false") << ", \"kappa\": [";
  for (size_t i = 0; i < c.kappa.size(); ++i)
    os << (i ? ", " : "") << fmt_sig(c.kappa[i]);
  os << "] }";
}

const char* kCertificateCsvHeader = "theta,t,lambda,slope,positive,kappa1,kappa2";

void write_certificate_csv_row(std::ostream& os, const PerturbationCertificate& c) {
  os << fmt_sig(c.theta) << "," << fmt_sig(c.t) << "," << fmt_sig(c.lambda) << ","
     << fmt_sig(c.slope) << "," << (c.positive ? 1 : 0);
  for (double k : c.kappa) os << "," << fmt_sig(k);
  os << "\n";
}

} // namespace capspec
