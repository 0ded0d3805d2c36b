#include "capspec/hole_models.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "capspec/numerics.hpp"

namespace capspec {

EllipseHole ellipse_from_lambda(double lambda) {
  if (!(lambda > 1.0))
    throw DomainError("ellipse_from_lambda: lambda must exceed 1 (slit limit), got " +
                      fmt_sig(lambda, 6));
  EllipseHole e;
  e.lambda = lambda;
  const double li = 1.0 / lambda;
  e.semi_major = std::sqrt((lambda + li) / (lambda - li));
  e.semi_minor = std::sqrt((lambda - li) / (lambda + li));
  e.area = kPi;
  e.cap = lambda / std::sqrt(lambda * lambda - li * li);
  e.c1 = li * li;
  e.M.setZero();
  e.M(0, 0) = 2.0 * kPi / (1.0 + e.c1);
  e.M(1, 1) = 2.0 * kPi / (1.0 - e.c1);
  return e;
}

double virtual_mass_form(double cap, std::complex<double> c1, double angle) {
  const std::complex<double> rot = std::exp(std::complex<double>(0.0, -2.0 * angle));
  return 2.0 * kPi * cap * cap * (1.0 - (c1 * rot).real());
}

BoundaryCurve ellipse_boundary(double lambda, int n) {
  const EllipseHole e = ellipse_from_lambda(lambda);
  BoundaryCurve c;
  c.param.resize(n);
  c.point.resize(n);
  c.tangent.resize(n);
  c.second.resize(n);
  for (int i = 0; i < n; ++i) {
    const double s = 2.0 * kPi * i / n;
    c.param[i] = s;
    c.point[i] = {e.semi_major * std::cos(s), e.semi_minor * std::sin(s)};
    c.tangent[i] = {-e.semi_major * std::sin(s), e.semi_minor * std::cos(s)};
    c.second[i] = -c.point[i];
  }
  return c;
}

BoundaryCurve circle_boundary(double radius, int n) {
  BoundaryCurve c;
  c.param.resize(n);
  c.point.resize(n);
  c.tangent.resize(n);
  c.second.resize(n);
  for (int i = 0; i < n; ++i) {
    const double s = 2.0 * kPi * i / n;
    c.param[i] = s;
    c.point[i] = {radius * std::cos(s), radius * std::sin(s)};
    c.tangent[i] = {-radius * std::sin(s), radius * std::cos(s)};
    c.second[i] = -c.point[i];
  }
  return c;
}

BoundaryCurve read_boundary_csv(std::istream& is) {
  BoundaryCurve c;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    double phi, x, y;
    if (!(ls >> phi >> x >> y)) continue;  // header or junk row
    c.param.push_back(phi);
    c.point.push_back({x, y});
  }
  const int n = static_cast<int>(c.param.size());
  if (n < 8) throw DomainError("read_boundary_csv: need at least 8 samples");
  c.tangent.resize(n);
  const double period = 2.0 * kPi;

  bool uniform = true;
  const double h0 = c.param.size() > 1 ? c.param[1] - c.param[0] : 0.0;
  for (int i = 0; i < n && uniform; ++i) {
    double d = c.param[(i + 1) % n] - c.param[i];
    if (d <= 0) d += period;
    uniform = std::abs(d - h0) < 1e-9 * (1.0 + std::abs(h0));
  }

  if (uniform) {
    c.second.resize(n);
    auto P = [&](int i) { return c.point[((i % n) + n) % n]; };
    for (int i = 0; i < n; ++i) {
      c.tangent[i] = (-P(i + 2) + 8 * P(i + 1) - 8 * P(i - 1) + P(i - 2)) / (12 * h0);
      c.second[i] =
          (-P(i + 2) + 16 * P(i + 1) - 30 * P(i) + 16 * P(i - 1) - P(i - 2)) / (12 * h0 * h0);
    }
  } else {
    for (int i = 0; i < n; ++i) {
      const int im = (i + n - 1) % n, ip = (i + 1) % n;
      double dm = c.param[i] - c.param[im];
      double dp = c.param[ip] - c.param[i];
      if (dm <= 0) dm += period;
      if (dp <= 0) dp += period;
      c.tangent[i] = (c.point[ip] - c.point[i]) * (dm / (dp * (dm + dp))) +
                     (c.point[i] - c.point[im]) * (dp / (dm * (dm + dp)));
    }
  }
  return c;
}

namespace {

// Gradients of the decaying harmonic basis, via F(z) = z^{-k}:
//   u_k = Re F = r^{-k} cos k phi,  grad u_k = (Re F', -Im F')
//   w_k = -Im F = r^{-k} sin k phi, grad w_k = (-Im F', -Re F')
void basis_gradients(const Eigen::Vector2d& x, int k, Eigen::Vector2d& grad_cos,
                     Eigen::Vector2d& grad_sin) {
  const std::complex<double> z(x[0], x[1]);
  const std::complex<double> fp = -double(k) * std::pow(z, -k - 1);
  grad_cos = {fp.real(), -fp.imag()};
  grad_sin = {-fp.imag(), -fp.real()};
}

} // namespace

ExteriorSolution exterior_neumann_oracle(const BoundaryCurve& boundary, int n_modes,
                                         int n_colloc) {
  const int nb = static_cast<int>(boundary.point.size());
  if (nb < 8) throw DomainError("exterior_neumann_oracle: boundary too small");
  if (n_colloc < 2 * n_modes + 8)
    throw DomainError("exterior_neumann_oracle: need n_colloc >= 2*n_modes + 8");

  // Collocation nodes: subsample of the boundary samples.
  std::vector<int> idx;
  if (nb >= n_colloc) {
    for (int i = 0; i < n_colloc; ++i) idx.push_back(i * nb / n_colloc);
  } else {
    for (int i = 0; i < nb; ++i) idx.push_back(i);
  }
  const int n = static_cast<int>(idx.size());

  std::vector<Eigen::Vector2d> pts(n), tng(n), nrm(n);
  Eigen::VectorXd w(n), curv(n);
  for (int i = 0; i < n; ++i) {
    const int j = idx[i];
    pts[i] = boundary.point[j];
    tng[i] = boundary.tangent[j];
    const Eigen::Vector2d t = tng[i].normalized();
    nrm[i] = {t[1], -t[0]};  // outward for a counterclockwise curve

    const int jn = idx[(i + 1) % n], jp = idx[(i + n - 1) % n];
    double dp = boundary.param[jn] - boundary.param[j];
    double dm = boundary.param[j] - boundary.param[jp];
    if (dp <= 0) dp += 2 * kPi;
    if (dm <= 0) dm += 2 * kPi;
    w(i) = tng[i].norm() * 0.5 * (dp + dm);

    Eigen::Vector2d sec;
    if (!boundary.second.empty()) {
      sec = boundary.second[j];
    } else {
      sec = (boundary.tangent[jn] - boundary.tangent[jp]) / (dp + dm);
    }
    const double sp = tng[i].norm();
    curv(i) = (tng[i][0] * sec[1] - tng[i][1] * sec[0]) / (sp * sp * sp);
  }

  // Single-layer ansatz W_p = S[sigma_p] with S[s](x) = -(1/2pi) oint ln|x-y| s(y) ds.
  // The exterior Neumann jump relation gives (-I/2 + K') sigma = -nu, with the
  // smooth adjoint double-layer kernel
  //   k'(x,y) = d/dnu(x) G(x,y) = -<x - y, nu(x)> / (2 pi |x - y|^2),
  // whose diagonal limit is -kappa(x)/(4 pi). A zero-mean constraint row selects
  // the decaying solution.
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n + 1, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double k;
      if (i == j) {
        k = -curv(i) / (4.0 * kPi);
      } else {
        const Eigen::Vector2d d = pts[i] - pts[j];
        k = -d.dot(nrm[i]) / (2.0 * kPi * d.squaredNorm());
      }
      A(i, j) = k * w(j);
    }
    A(i, i) -= 0.5;
  }
  const double wn = w.norm();
  for (int j = 0; j < n; ++j) A(n, j) = w(j) / wn;

  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double cond =
      svd.singularValues()(0) / svd.singularValues()(svd.singularValues().size() - 1);
  if (!(cond < 1e12))
    throw ConvergenceError(
        "exterior_neumann_oracle: collocation system condition " + fmt_sig(cond, 3) +
        " exceeds 1e12; increase n_colloc or supply a smoother boundary");

  ExteriorSolution sol;
  sol.boundary = boundary;
  sol.n_modes = n_modes;
  sol.coeff_a.setZero(2, n_modes);
  sol.coeff_b.setZero(2, n_modes);
  sol.condition = cond;
  sol.density.setZero(2, n);
  sol.node_weight = w;
  sol.node_index = idx;

  double worst = 0.0;
  for (int p = 0; p < 2; ++p) {
    Eigen::VectorXd rhs(n + 1);
    for (int i = 0; i < n; ++i) rhs(i) = -nrm[i][p];
    rhs(n) = 0.0;
    const Eigen::VectorXd sigma = svd.solve(rhs);
    sol.density.row(p) = sigma.transpose();
    worst = std::max(worst, (A * sigma - rhs).lpNorm<Eigen::Infinity>());

    // Far-field moments of the layer potential:
    //   W_p(z) = sum_k Re(m_k z^{-k}),  m_k = (1/(2 pi k)) oint sigma_p w^k ds.
    for (int k = 1; k <= n_modes; ++k) {
      std::complex<double> m(0.0, 0.0);
      for (int j = 0; j < n; ++j)
        m += sigma(j) * std::pow(std::complex<double>(pts[j][0], pts[j][1]), k) * w(j);
      m /= 2.0 * kPi * k;
      sol.coeff_a(p, k - 1) = m.real();
      sol.coeff_b(p, k - 1) = m.imag();
    }
  }
  sol.residual = worst;

  // W_p ~ (a_{p,1} x + b_{p,1} y)/|x|^2 and W = M x/(2 pi |x|^2) identify M.
  sol.M_est(0, 0) = 2.0 * kPi * sol.coeff_a(0, 0);
  sol.M_est(0, 1) = 2.0 * kPi * sol.coeff_b(0, 0);
  sol.M_est(1, 0) = 2.0 * kPi * sol.coeff_a(1, 0);
  sol.M_est(1, 1) = 2.0 * kPi * sol.coeff_b(1, 0);
  return sol;
}

namespace {

Eigen::Vector2d field_gradient(const ExteriorSolution& sol, int p, const Eigen::Vector2d& x) {
  Eigen::Vector2d g = Eigen::Vector2d::Zero();
  for (int k = 1; k <= sol.n_modes; ++k) {
    Eigen::Vector2d gc, gs;
    basis_gradients(x, k, gc, gs);
    g += sol.coeff_a(p, k - 1) * gc + sol.coeff_b(p, k - 1) * gs;
  }
  return g;
}

double field_value(const ExteriorSolution& sol, int p, const Eigen::Vector2d& x) {
  const std::complex<double> z(x[0], x[1]);
  double v = 0.0;
  for (int k = 1; k <= sol.n_modes; ++k) {
    const std::complex<double> zk = std::pow(z, -k);
    v += sol.coeff_a(p, k - 1) * zk.real() - sol.coeff_b(p, k - 1) * zk.imag();
  }
  return v;
}

// S[sigma] evaluated at the nodes themselves, splitting off the periodic log
// singularity (Kress quadrature). Requires uniformly spaced parameters.
Eigen::VectorXd single_layer_on_boundary(const std::vector<Eigen::Vector2d>& pts,
                                         const std::vector<double>& speed,
                                         const Eigen::VectorXd& sigma) {
  const int n = static_cast<int>(pts.size());
  if (n % 2) throw DomainError("single_layer_on_boundary: need an even node count");

  std::vector<double> R(n);
  for (int m = 0; m < n; ++m) {
    double s = 0.0;
    for (int k = 1; k <= n / 2 - 1; ++k) s += std::cos(2.0 * kPi * k * m / n) / k;
    R[m] = -(4.0 * kPi / n) * s - (4.0 * kPi / (n * n)) * (m % 2 ? -1.0 : 1.0);
  }

  Eigen::VectorXd out(n);
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
      const double f = sigma(j) * speed[j];
      double lnF;
      if (i == j) {
        lnF = std::log(speed[i]);
      } else {
        const double si = 2.0 * std::abs(std::sin(kPi * (i - j) / n));
        lnF = std::log((pts[i] - pts[j]).norm() / si);
      }
      acc += 0.5 * R[std::abs(i - j)] * f + (2.0 * kPi / n) * lnF * f;
    }
    out(i) = -acc / (2.0 * kPi);
  }
  return out;
}

} // namespace

Eigen::Matrix2d energy_virtual_mass(const ExteriorSolution& sol, double area) {
  const int n = static_cast<int>(sol.node_index.size());
  if (sol.n_modes <= 0 || n == 0 || !(sol.residual < 1e-6))
    throw ConvergenceError("energy_virtual_mass: input solution is not converged");

  std::vector<Eigen::Vector2d> pts(n), nrm(n);
  std::vector<double> speed(n);
  double r_bmax = 0.0, ds = -1.0;
  for (int i = 0; i < n; ++i) {
    const int j = sol.node_index[i];
    pts[i] = sol.boundary.point[j];
    const Eigen::Vector2d t = sol.boundary.tangent[j];
    speed[i] = t.norm();
    nrm[i] = Eigen::Vector2d(t[1], -t[0]) / speed[i];
    r_bmax = std::max(r_bmax, pts[i].norm());
    const int jn = sol.node_index[(i + 1) % n];
    double d = sol.boundary.param[jn] - sol.boundary.param[j];
    if (d <= 0) d += 2 * kPi;
    if (ds < 0) ds = d;
    else if (std::abs(d - ds) > 1e-9 * (1 + std::abs(ds)))
      throw DomainError("energy_virtual_mass: nodes must be uniform in parameter");
  }

  const double r0 = 1.5 * r_bmax;  // the truncated far-field series is reliable here
  const double r_out = 10.0;
  if (r0 >= r_out)
    throw DomainError("energy_virtual_mass: boundary too large for the fixed annulus");

  // Inner collar [boundary, r0] by Green's identity: the integrand is harmonic,
  // so the Dirichlet energy reduces to boundary terms; dW/dnu = -nu on the hole.
  Eigen::Matrix2d collar = Eigen::Matrix2d::Zero();
  std::array<Eigen::VectorXd, 2> Wb = {
      single_layer_on_boundary(pts, speed, sol.density.row(0).transpose()),
      single_layer_on_boundary(pts, speed, sol.density.row(1).transpose())};
  for (int p = 0; p < 2; ++p)
    for (int q = 0; q < 2; ++q) {
      double hole_term = 0.0;
      for (int i = 0; i < n; ++i) hole_term += Wb[p](i) * nrm[i][q] * sol.node_weight(i);
      collar(p, q) += hole_term;
    }
  const int n_ang = 512;
  for (int ia = 0; ia < n_ang; ++ia) {
    const double a = 2.0 * kPi * ia / n_ang;
    const Eigen::Vector2d rhat{std::cos(a), std::sin(a)};
    const Eigen::Vector2d x = r0 * rhat;
    const double W0 = field_value(sol, 0, x), W1 = field_value(sol, 1, x);
    const double d0 = field_gradient(sol, 0, x).dot(rhat);
    const double d1 = field_gradient(sol, 1, x).dot(rhat);
    const double w = (2.0 * kPi / n_ang) * r0;
    collar(0, 0) += w * W0 * d0;
    collar(0, 1) += w * W0 * d1;
    collar(1, 0) += w * W1 * d0;
    collar(1, 1) += w * W1 * d1;
  }

  // Annulus [r0, r_out]: Gauss-Legendre in radius, trapezoid in angle.
  const int n_rad = 64;
  std::vector<double> gl_x, gl_w;
  gauss_legendre(n_rad, gl_x, gl_w);
  const double half = 0.5 * (r_out - r0), mid = 0.5 * (r_out + r0);
  Eigen::Matrix2d annulus = Eigen::Matrix2d::Zero();
  for (int ia = 0; ia < n_ang; ++ia) {
    const double a = 2.0 * kPi * ia / n_ang;
    for (int ir = 0; ir < n_rad; ++ir) {
      const double r = mid + half * gl_x[ir];
      const Eigen::Vector2d x{r * std::cos(a), r * std::sin(a)};
      const Eigen::Vector2d g0 = field_gradient(sol, 0, x);
      const Eigen::Vector2d g1 = field_gradient(sol, 1, x);
      const double w = gl_w[ir] * half * r * (2.0 * kPi / n_ang);
      annulus(0, 0) += w * g0.dot(g0);
      annulus(0, 1) += w * g0.dot(g1);
      annulus(1, 1) += w * g1.dot(g1);
    }
  }
  annulus(1, 0) = annulus(0, 1);

  // Analytic tail over r > r_out: int |grad r^{-k} trig|^2 = pi k / r_out^{2k} per mode.
  Eigen::Matrix2d tail = Eigen::Matrix2d::Zero();
  for (int k = 1; k <= sol.n_modes; ++k) {
    const double f = k * kPi / std::pow(r_out, 2 * k);
    for (int p = 0; p < 2; ++p)
      for (int q = 0; q < 2; ++q)
        tail(p, q) += f * (sol.coeff_a(p, k - 1) * sol.coeff_a(q, k - 1) +
                           sol.coeff_b(p, k - 1) * sol.coeff_b(q, k - 1));
  }

  Eigen::Matrix2d M = collar + annulus + tail;
  M = 0.5 * (M + M.transpose().eval());
  M(0, 0) += area;
  M(1, 1) += area;
  return M;
}

void write_matrix_json(std::ostream& os, const Eigen::Matrix2d& M) {
  os << "{ \"m11\": " << fmt_sig(M(0, 0)) << ", \"m12\": " << fmt_sig(M(0, 1))
     << ", \"m22\": " << fmt_sig(M(1, 1)) << " }";
}

} // namespace capspec
