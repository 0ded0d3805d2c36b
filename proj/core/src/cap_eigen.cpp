#include "capspec/cap_eigen.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <mutex>
#include <ostream>

#include <boost/numeric/odeint.hpp>

namespace capspec {

namespace {

namespace odeint = boost::numeric::odeint;

using State = std::array<double, 3>;  // g, g', int g^2 sin

struct RadialRhs {
  double mu;
  void operator()(const State& y, State& dy, double t) const {
    const double s = std::sin(t), c = std::cos(t);
    dy[0] = y[1];
    dy[1] = -(c / s) * y[1] + (1.0 / (s * s) - mu) * y[0];
    dy[2] = y[0] * y[0] * s;
  }
};

double gpp_of(double mu, double t, double g, double gp) {
  const double s = std::sin(t);
  return -(std::cos(t) / s) * gp + (1.0 / (s * s) - mu) * g;
}

double gppp_of(double mu, double t, double g, double gp, double gpp) {
  const double s = std::sin(t), c = std::cos(t);
  return (1.0 / (s * s)) * gp - (c / s) * gpp - (2.0 * c / (s * s * s)) * g +
         (1.0 / (s * s) - mu) * gp;
}

// Series of the regular solution at t = 0: g = t + a3 t^3 + a5 t^5 + O(t^7),
// obtained by substituting into the equation.
void series_start(double mu, double t0, double& g, double& gp, double& w) {
  const double a3 = (2.0 - 3.0 * mu) / 24.0;
  const double a5 = (4.0 / 45.0 - a3 * (mu - 4.0 / 3.0)) / 24.0;
  const double t2 = t0 * t0;
  g = t0 * (1.0 + t2 * (a3 + t2 * a5));
  gp = 1.0 + t2 * (3.0 * a3 + t2 * 5.0 * a5);
  w = 0.25 * t2 * t2;  // int_0^t0 g^2 sin ~ int t^3
}

// Quintic Hermite on [t_a, t_b] given values and first/second derivatives at
// the ends; keeps dense evaluation at the integrator's own accuracy.
double hermite5(double t, double ta, double tb, double ya, double da, double sa,
                double yb, double db, double sb) {
  const double h = tb - ta, x = (t - ta) / h;
  const double x2 = x * x, x3 = x2 * x, x4 = x3 * x, x5 = x4 * x;
  const double p0 = 1 - 10 * x3 + 15 * x4 - 6 * x5;
  const double p1 = x - 6 * x3 + 8 * x4 - 3 * x5;
  const double p2 = 0.5 * x2 - 1.5 * x3 + 1.5 * x4 - 0.5 * x5;
  const double q0 = 10 * x3 - 15 * x4 + 6 * x5;
  const double q1 = -4 * x3 + 7 * x4 - 3 * x5;
  const double q2 = 0.5 * x3 - x4 + 0.5 * x5;
  return ya * p0 + da * h * p1 + sa * h * h * p2 + yb * q0 + db * h * q1 + sb * h * h * q2;
}

struct ProfileEval {
  const std::vector<ProfileNode>* nodes;
  double mu, t0, scale;

  const ProfileNode& at(size_t i) const { return (*nodes)[i]; }

  size_t segment(double t) const {
    const auto& v = *nodes;
    auto it = std::upper_bound(v.begin(), v.end(), t,
                               [](double x, const ProfileNode& n) { return x < n.t; });
    size_t i = static_cast<size_t>(it - v.begin());
    if (i == 0) return 0;
    if (i >= v.size()) return v.size() - 2;
    return i - 1;
  }

  double g(double t) const {
    if (t <= t0) {
      double gg, gp, w;
      series_start(mu, std::max(t, 0.0), gg, gp, w);
      return t <= 0.0 ? 0.0 : scale * gg;
    }
    const size_t i = segment(t);
    const auto &a = at(i), &b = at(i + 1);
    return hermite5(t, a.t, b.t, a.g, a.gp, a.gpp, b.g, b.gp, b.gpp);
  }

  double gprime(double t) const {
    if (t <= t0) {
      double gg, gp, w;
      series_start(mu, std::max(t, 1e-300), gg, gp, w);
      return scale * gp;
    }
    const size_t i = segment(t);
    const auto &a = at(i), &b = at(i + 1);
    return hermite5(t, a.t, b.t, a.gp, a.gpp, a.gppp, b.gp, b.gpp, b.gppp);
  }
};

} // namespace

ShootResult shoot_radial(double mu, double theta, double extend_to, double t0) {
  if (!(theta > 0.0) || !(theta < kPi))
    throw DomainError("shoot_radial: theta must lie in (0, pi), got " + fmt_sig(theta, 6));
  if (!(mu > 0.0))
    throw DomainError("shoot_radial: mu must be positive, got " + fmt_sig(mu, 6));

  const RadialRhs rhs{mu};
  State y;
  series_start(mu, t0, y[0], y[1], y[2]);

  ShootResult out;
  auto record = [&](const State& s, double t) {
    if (!out.profile.empty() && !(t > out.profile.back().t)) return;
    const double gpp = gpp_of(mu, t, s[0], s[1]);
    out.profile.push_back({t, s[0], s[1], gpp, gppp_of(mu, t, s[0], s[1], gpp), s[2]});
  };

  auto stepper = odeint::make_controlled(1e-13, 1e-11,
                                         odeint::runge_kutta_dopri5<State>());
  try {
    odeint::integrate_adaptive(stepper, rhs, y, t0, theta, 1e-4, record);
  } catch (const std::exception& e) {
    throw ConvergenceError(std::string("shoot_radial: integration failed: ") + e.what());
  }
  if (out.profile.empty() || std::abs(out.profile.back().t - theta) > 1e-12)
    throw ConvergenceError("shoot_radial: integrator did not reach theta");

  out.g_end = out.profile.back().g;
  out.gprime_end = out.profile.back().gp;

  if (extend_to > theta) {
    const double cap = std::min(extend_to, kPi - 1e-6);
    odeint::integrate_adaptive(stepper, rhs, y, theta, cap, 1e-5, record);
  }
  return out;
}

namespace {

// First sign change of g'(theta; mu) over an increasing mu grid, refined by Brent.
double first_neumann_root(double theta, double mu_lo, double mu_hi, double step) {
  auto f = [&](double mu) { return shoot_radial(mu, theta).gprime_end; };
  double a = mu_lo, fa = f(a);
  for (double b = a + step; b <= mu_hi + 1e-12; b += step) {
    const double fb = f(b);
    if (fa == 0.0) return a;
    if (fa * fb < 0.0) {
      const double mu = brent_root(f, a, b, fa, fb, 1e-13);
      return mu;
    }
    a = b;
    fa = fb;
  }
  throw ConvergenceError("mu1_of_cap: no sign change of g'(theta) for mu in (" +
                         fmt_sig(mu_lo, 4) + ", " + fmt_sig(mu_hi, 4) + "], theta = " +
                         fmt_sig(theta, 8));
}

} // namespace

double mu1_of_cap(double theta) {
  if (!(theta > 0.0) || !(theta < kPi))
    throw DomainError("mu1_of_cap: theta must lie in (0, pi), got " + fmt_sig(theta, 6));

  double mu;
  if (theta >= 0.1 * kPi) {
    mu = first_neumann_root(theta, 0.05, 40.0, 0.25);
  } else {
    // Flat-disk estimate mu1 ~ (j'_{1,1}/theta)^2 localizes the scan.
    const double jp11 = 1.8411837813406593;
    const double est = (jp11 / theta) * (jp11 / theta);
    mu = first_neumann_root(theta, 0.4 * est, 1.8 * est, est / 100.0);
  }

  // The first root must have g > 0 on (0, theta]; with the regular start g ~ t
  // this is automatic, but verify on the grid.
  const ShootResult s = shoot_radial(mu, theta);
  for (const auto& n : s.profile)
    if (n.g <= 0.0)
      throw ConvergenceError("mu1_of_cap: candidate profile not positive at t = " +
                             fmt_sig(n.t, 8));
  return mu;
}

CapEigen CapEigen::compute(double theta) {
  CapEigen ce;
  ce.theta_ = theta;
  ce.mu1_ = mu1_of_cap(theta);

  // Extend a short distance past theta so boundary finite differences and
  // endpoint interpolation stay centered.
  const double ext = std::min(theta + 0.02, kPi - 1e-6);
  ShootResult s = shoot_radial(ce.mu1_, theta, ext);

  size_t n_in = 0;
  while (n_in < s.profile.size() && s.profile[n_in].t <= theta + 1e-15) ++n_in;

  const double w_total = s.profile[n_in - 1].w;  // int_0^theta g^2 sin
  ce.norm_ = 1.0 / std::sqrt(kPi * w_total);

  ce.grid_.assign(s.profile.begin(), s.profile.begin() + n_in);
  ce.extended_.assign(s.profile.begin() + (n_in > 0 ? n_in - 1 : 0), s.profile.end());
  for (auto* vec : {&ce.grid_, &ce.extended_})
    for (auto& n : *vec) {
      n.g *= ce.norm_;
      n.gp *= ce.norm_;
      n.gpp *= ce.norm_;
      n.gppp *= ce.norm_;
      n.w *= ce.norm_ * ce.norm_;
    }
  return ce;
}

double CapEigen::g(double t) const {
  const auto& nodes = (t > theta_ && extended_.size() >= 2) ? extended_ : grid_;
  ProfileEval ev{&nodes, mu1_, t0_, norm_};
  return ev.g(t);
}

double CapEigen::gprime(double t) const {
  const auto& nodes = (t > theta_ && extended_.size() >= 2) ? extended_ : grid_;
  ProfileEval ev{&nodes, mu1_, t0_, norm_};
  return ev.gprime(t);
}

void CapEigen::write_csv(std::ostream& os) const {
  os << "t,g,gprime\n";
  for (const auto& n : grid_)
    os << fmt_sig(n.t) << "," << fmt_sig(n.g) << "," << fmt_sig(n.gp) << "\n";
}

double find_Theta() {
  auto f = [](double th) {
    const double s = std::sin(th);
    return mu1_of_cap(th) * s * s - 1.0;
  };
  const double a = 0.6 * kPi, b = 0.8 * kPi;
  const double fa = f(a), fb = f(b);
  if (fa * fb > 0.0)
    throw ConvergenceError("find_Theta: no sign change of mu1 sin^2 - 1 on (0.6pi, 0.8pi)");
  return brent_root(f, a, b, fa, fb, 1e-10);
}

double Theta_cached() {
  static double value = 0.0;
  static std::once_flag flag;
  std::call_once(flag, [] { value = find_Theta(); });
  return value;
}

double find_tmax(double theta) {
  const double Theta = Theta_cached();
  if (!(theta > Theta))
    throw DomainError("find_tmax: theta must exceed Theta = " + fmt_sig(Theta, 10) +
                      ", got " + fmt_sig(theta, 10));
  const CapEigen cap = CapEigen::compute(theta);

  // g' changes sign exactly once, in (pi/2, Theta).
  const double lo = 0.5 * kPi, hi = std::min(Theta, theta);
  auto gp = [&](double t) { return cap.gprime(t); };
  double a = lo, fa = gp(a);
  const int n = 200;
  for (int i = 1; i <= n; ++i) {
    const double b = lo + (hi - lo) * i / n;
    const double fb = gp(b);
    if (fa * fb <= 0.0 && fa > 0.0)
      return brent_root(gp, a, b, fa, fb, 1e-12);
    a = b;
    fa = fb;
  }
  throw ConvergenceError("find_tmax: no sign change of g' in (pi/2, Theta) for theta = " +
                         fmt_sig(theta, 10));
}

GDerivs g_derivatives_at_Theta() {
  const double Theta = Theta_cached();
  const CapEigen cap = CapEigen::compute(Theta);

  auto g = [&](double t) { return cap.g(t); };
  auto d2 = [&](double h) { return (g(Theta + h) - 2.0 * g(Theta) + g(Theta - h)) / (h * h); };
  auto d3 = [&](double h) {
    return (g(Theta + 2 * h) - 2.0 * g(Theta + h) + 2.0 * g(Theta - h) - g(Theta - 2 * h)) /
           (2.0 * h * h * h);
  };

  const double h = 1e-3;
  GDerivs out;
  out.g2 = (4.0 * d2(h / 2) - d2(h)) / 3.0;  // one Richardson pass
  out.g3 = (4.0 * d3(h / 2) - d3(h)) / 3.0;
  return out;
}

} // namespace capspec
