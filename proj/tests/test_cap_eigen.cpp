#include <cmath>
#include <sstream>

#include "capspec/cap_eigen.hpp"
#include "doctest.h"

using namespace capspec;

namespace {

// Composite Simpson of f on [a,b]; independent of the solver's own quadrature.
double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

} // namespace

TEST_CASE("shoot_radial reproduces the coordinate eigenfunction at mu = 2") {
  // x1 = sin t cos phi solves the equation with mu = 2, so g = sin t exactly.
  auto half = shoot_radial(2.0, kPi / 2);
  CHECK(std::abs(half.gprime_end) < 1e-9);
  CHECK(half.g_end == doctest::Approx(1.0).epsilon(1e-9));

  auto quarter = shoot_radial(2.0, kPi / 4);
  CHECK(quarter.gprime_end == doctest::Approx(std::cos(kPi / 4)).epsilon(1e-9));

  for (double theta : {0.3, 1.2, 2.6}) {
    auto s = shoot_radial(2.0, theta);
    for (const auto& n : s.profile)
      CHECK(n.g == doctest::Approx(std::sin(n.t)).epsilon(1e-8));
  }
}

TEST_CASE("shoot_radial rejects bad input") {
  CHECK_THROWS_AS(shoot_radial(2.0, -0.1), DomainError);
  CHECK_THROWS_AS(shoot_radial(2.0, 3.5), DomainError);
  CHECK_THROWS_AS(shoot_radial(-1.0, 1.0), DomainError);
}

TEST_CASE("mu1_of_cap hemisphere anchor and sign relation") {
  CHECK(mu1_of_cap(kPi / 2) == doctest::Approx(2.0).epsilon(1e-8));

  const double th = 0.6 * kPi;
  const double mu = mu1_of_cap(th);
  CHECK(mu * std::sin(th) * std::sin(th) > 1.0);
}

TEST_CASE("mu1_of_cap is invariant under halving the series start offset") {
  const double theta = 0.8 * kPi;
  auto mu1_with_t0 = [&](double t0) {
    auto f = [&](double mu) { return shoot_radial(mu, theta, -1.0, t0).gprime_end; };
    return brent_root(f, 1.0, 3.0, 1e-14);
  };
  const double a = mu1_with_t0(1e-4);
  const double b = mu1_with_t0(5e-5);
  CHECK(std::abs(a - b) / a < 1e-9);
}

TEST_CASE("normalized profile: hemisphere closed form and quadrature identity") {
  const CapEigen cap = CapEigen::compute(kPi / 2);
  const double c = std::sqrt(3.0 / (2.0 * kPi));  // pi c^2 int_0^{pi/2} sin^3 = 1
  CHECK(cap.g(1.0) == doctest::Approx(c * std::sin(1.0)).epsilon(1e-8));
  CHECK(cap.gprime(0.5) == doctest::Approx(c * std::cos(0.5)).epsilon(1e-7));

  for (double theta : {0.4 * kPi, 0.62 * kPi, 0.8 * kPi}) {
    const CapEigen ce = CapEigen::compute(theta);
    auto f = [&](double t) { return ce.g(t) * ce.g(t) * std::sin(t); };
    CHECK(kPi * simpson(f, 0.0, theta, 4000) == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("profile shape: monotone below Theta, single interior maximum above") {
  const CapEigen below = CapEigen::compute(0.5 * kPi);
  for (const auto& n : below.grid())
    if (n.t < below.theta() - 1e-6) CHECK(n.gp > 0.0);

  const CapEigen above = CapEigen::compute(0.8 * kPi);
  int sign_changes = 0;
  for (size_t i = 1; i < above.grid().size(); ++i)
    if (above.grid()[i - 1].gp > 0.0 && above.grid()[i].gp <= 0.0) ++sign_changes;
  CHECK(sign_changes == 1);
  CHECK(std::abs(above.grid().back().gp) < 1e-8);
  for (const auto& n : above.grid()) CHECK(n.g > 0.0);
}

TEST_CASE("ODE residual of the returned profile") {
  const CapEigen cap = CapEigen::compute(0.75 * kPi);
  const double mu = cap.mu1(), h = 1e-3;
  double worst = 0.0;
  for (double t = 0.1; t < cap.theta() - h; t += 0.01) {
    const double d2 = (cap.g(t + h) - 2 * cap.g(t) + cap.g(t - h)) / (h * h);
    const double d1 = (cap.g(t + h) - cap.g(t - h)) / (2 * h);
    const double s = std::sin(t);
    const double res = -d2 - (std::cos(t) / s) * d1 + cap.g(t) / (s * s) - mu * cap.g(t);
    worst = std::max(worst, std::abs(res));
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("find_Theta: bracket, defining relation, sign pattern") {
  const double Theta = Theta_cached();
  CHECK(Theta > 0.70 * kPi);
  CHECK(Theta < 0.71 * kPi);
  const double s = std::sin(Theta);
  CHECK(std::abs(mu1_of_cap(Theta) * s * s - 1.0) < 1e-6);

  auto rel = [](double th) { return mu1_of_cap(th) * std::sin(th) * std::sin(th) - 1.0; };
  CHECK(rel(0.6 * kPi) > 0.0);
  CHECK(rel(0.8 * kPi) < 0.0);
}

TEST_CASE("find_tmax: bracket, continuity at Theta, eigenvalue coincidence") {
  const double Theta = Theta_cached();

  const double t8 = find_tmax(0.8 * kPi);
  CHECK(t8 > kPi / 2);
  CHECK(t8 < Theta);
  // g'(t_max) = 0 makes the restricted profile a Neumann eigenfunction on B_tmax.
  CHECK(mu1_of_cap(t8) == doctest::Approx(mu1_of_cap(0.8 * kPi)).epsilon(1e-6));

  const double tnear = find_tmax(Theta + 1e-3);
  CHECK(std::abs(tnear - Theta) < 0.05);

  CHECK_THROWS_AS(find_tmax(0.5 * kPi), DomainError);
  CHECK_THROWS_AS(find_tmax(Theta), DomainError);
}

TEST_CASE("finite differences at Theta: g'' vanishes, g''' matches the closed form") {
  const double Theta = Theta_cached();
  const CapEigen cap = CapEigen::compute(Theta);
  const GDerivs d = g_derivatives_at_Theta();

  CHECK(std::abs(cap.gprime(Theta)) < 1e-8);  // Neumann condition
  CHECK(std::abs(d.g2) < 1e-4 * cap.g(Theta));

  const double expected =
      -2.0 * (std::cos(Theta) / std::pow(std::sin(Theta), 3)) * cap.g(Theta);
  CHECK(expected > 0.0);
  CHECK(d.g3 == doctest::Approx(expected).epsilon(0.01));
}

TEST_CASE("mu1 is continuous in theta on a coarse grid") {
  double prev = mu1_of_cap(0.3 * kPi);
  for (int i = 1; i <= 15; ++i) {
    const double th = (0.3 + 0.04 * i) * kPi;
    const double cur = mu1_of_cap(th);
    CHECK(std::abs(cur - prev) < 2.5);  // no jumps; slope is O(1) per radian
    prev = cur;
  }
}

TEST_CASE("profile CSV export") {
  const CapEigen cap = CapEigen::compute(0.6 * kPi);
  std::ostringstream os;
  cap.write_csv(os);
  const std::string text = os.str();
  CHECK(text.rfind("t,g,gprime\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == static_cast<long>(cap.grid().size()) + 1);
}
