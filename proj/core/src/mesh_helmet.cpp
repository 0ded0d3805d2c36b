#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <unordered_map>

#include "capspec/mesh.hpp"

namespace capspec {

namespace {

// Legs live in rotated spherical coordinates about the great circle x2 = 0:
//   P(alpha, beta) = (cos b sin a, sin b, cos b cos a),
// so x2 = sin(beta) is the transverse strip coordinate. A leg of strip A spans
// alpha from the cap rim to the south-square side x1 = eps.
double alpha_start(double beta, double theta_eps) {
  const double r = std::cos(theta_eps) / std::cos(beta);
  if (std::abs(r) > 1.0)
    throw GeometryError("mesh_helmet: cap rim does not cross the strip");
  return std::acos(r);
}

double alpha_end(double beta, double eps) {
  return kPi - std::asin(eps / std::cos(beta));
}

double leg_area(double theta_eps, double eps) {
  const double b_eps = std::asin(eps);
  const int n = 200;
  double acc = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double beta = -b_eps + 2.0 * b_eps * i / n;
    const double len = alpha_end(beta, eps) - alpha_start(beta, theta_eps);
    if (len < 0.0) throw GeometryError("mesh_helmet: strip leg collapsed");
    acc += len * std::cos(beta) * (i == 0 || i == n ? 0.5 : 1.0);
  }
  return acc * 2.0 * b_eps / n;
}

double square_area(double eps) {
  std::vector<double> x, w;
  gauss_legendre(32, x, w);
  double acc = 0.0;
  for (int i = 0; i < 32; ++i)
    for (int j = 0; j < 32; ++j) {
      const double p = eps * x[i], q = eps * x[j];
      acc += w[i] * w[j] / std::sqrt(1.0 - p * p - q * q);
    }
  return acc * eps * eps;
}

double helmet_area(double theta_eps, double eps) {
  return 2.0 * kPi * (1.0 - std::cos(theta_eps)) + 4.0 * leg_area(theta_eps, eps) +
         square_area(eps);
}

Eigen::Vector3d rot90(const Eigen::Vector3d& p, int times) {
  Eigen::Vector3d q = p;
  for (int i = 0; i < ((times % 4) + 4) % 4; ++i) q = Eigen::Vector3d(-q[1], q[0], q[2]);
  return q;
}

// Vertex welding across pieces: exact constructions may differ by a few ulp.
struct Weld {
  std::vector<Eigen::Vector3d> v;
  std::vector<std::array<int, 3>> tri;
  std::unordered_map<long long, std::vector<int>> grid;
  static constexpr double kCell = 1e-7;

  long long key(double x, double y, double z, int dx, int dy, int dz) const {
    const long long a = static_cast<long long>(std::floor(x / kCell)) + dx;
    const long long b = static_cast<long long>(std::floor(y / kCell)) + dy;
    const long long c = static_cast<long long>(std::floor(z / kCell)) + dz;
    return (a * 73856093LL) ^ (b * 19349663LL) ^ (c * 83492791LL);
  }

  int add(const Eigen::Vector3d& p) {
    for (int dx = -1; dx <= 1; ++dx)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dz = -1; dz <= 1; ++dz) {
          auto it = grid.find(key(p[0], p[1], p[2], dx, dy, dz));
          if (it == grid.end()) continue;
          for (int id : it->second)
            if ((v[id] - p).norm() < 1e-9) return id;
        }
    v.push_back(p);
    const int id = static_cast<int>(v.size()) - 1;
    grid[key(p[0], p[1], p[2], 0, 0, 0)].push_back(id);
    return id;
  }

  void add_tri(int a, int b, int c) {
    if (a == b || b == c || a == c) return;  // welded-away sliver
    tri.push_back({a, b, c});
  }
};

} // namespace

double helmet_matched_aperture(double theta, double eps) {
  if (!(eps > 0.0) || !(eps < 0.3))
    throw DomainError("helmet_matched_aperture: eps must lie in (0, 0.3)");
  if (!(theta > 0.5 * kPi) || !(theta < kPi))
    throw DomainError("helmet_matched_aperture: theta must lie in (pi/2, pi)");

  const double target = 2.0 * kPi * (1.0 - std::cos(theta));
  auto f = [&](double th) { return helmet_area(th, eps) - target; };
  double lo = std::max(0.55 * kPi, theta - 0.6), hi = theta;
  const double fhi = f(hi);
  if (fhi < 0.0) throw ConvergenceError("helmet_matched_aperture: area solve bracket");
  double flo = f(lo);
  while (flo > 0.0 && lo > 0.51 * kPi) {
    lo -= 0.05;
    flo = f(lo);
  }
  if (flo > 0.0) throw ConvergenceError("helmet_matched_aperture: no bracket found");
  return brent_root(f, lo, hi, flo, fhi, 1e-12);
}

SurfaceMesh mesh_helmet(double theta, double eps, double h) {
  if (!(eps > 0.0) || !(eps < 0.3))
    throw DomainError("mesh_helmet: eps must lie in (0, 0.3)");
  if (!(h > 0.0) || !(h < 0.5)) throw DomainError("mesh_helmet: h must lie in (0, 0.5)");

  const double theta_eps = helmet_matched_aperture(theta, eps);
  if (std::sqrt(1.0 - 2.0 * eps * eps) <= -std::cos(theta_eps))
    throw GeometryError("mesh_helmet: cap rim reaches the strip crossing");

  Weld w;

  // Transverse grid q_j = x2 values, exactly symmetric.
  const int n_w = 2 * std::max<int>(2, std::lround(std::ceil(eps / h)));
  std::vector<double> qs(n_w + 1);
  for (int j = 0; j <= n_w / 2; ++j) {
    const double val = eps * (n_w - 2 * j) / n_w;
    qs[n_w - j] = val;
    qs[j] = -val;
  }
  qs[n_w / 2] = 0.0;

  // South square {|x1|<=eps, |x2|<=eps, x3<0} on the same grid in both axes.
  std::vector<std::vector<int>> sq(n_w + 1, std::vector<int>(n_w + 1));
  for (int i = 0; i <= n_w; ++i)
    for (int j = 0; j <= n_w; ++j) {
      const double p = qs[i], q = qs[j];
      sq[i][j] = w.add({p, q, -std::sqrt(1.0 - p * p - q * q)});
    }
  for (int i = 0; i < n_w; ++i)
    for (int j = 0; j < n_w; ++j) {
      const int a = sq[i][j], b = sq[i + 1][j], c = sq[i + 1][j + 1], d = sq[i][j + 1];
      if ((w.v[a] - w.v[c]).squaredNorm() <= (w.v[b] - w.v[d]).squaredNorm()) {
        w.add_tri(a, b, c);
        w.add_tri(a, c, d);
      } else {
        w.add_tri(a, b, d);
        w.add_tri(b, c, d);
      }
    }

  // Leg of strip A on the x1 > 0 side, then exact-rotated copies.
  std::vector<double> betas(n_w + 1);
  for (int j = 0; j <= n_w; ++j) betas[j] = std::asin(qs[j]);
  double max_len = 0.0;
  for (int j = 0; j <= n_w; ++j)
    max_len = std::max(max_len,
                       alpha_end(betas[j], eps) - alpha_start(betas[j], theta_eps));
  const int n_s = std::max<int>(2, std::lround(std::ceil(max_len / h)));

  std::vector<std::vector<Eigen::Vector3d>> leg(n_s + 1,
                                                std::vector<Eigen::Vector3d>(n_w + 1));
  for (int j = 0; j <= n_w; ++j) {
    const double b = betas[j], cb = std::cos(b);
    const double a0 = alpha_start(b, theta_eps), a1 = alpha_end(b, eps);
    for (int i = 0; i <= n_s; ++i) {
      const double a = a0 + (a1 - a0) * i / n_s;
      leg[i][j] = {cb * std::sin(a), qs[j], cb * std::cos(a)};
    }
  }
  std::vector<std::vector<int>> rim_arcs(4);  // leg-top vertex ids per strip copy
  for (int copy = 0; copy < 4; ++copy) {
    std::vector<std::vector<int>> ids(n_s + 1, std::vector<int>(n_w + 1));
    for (int i = 0; i <= n_s; ++i)
      for (int j = 0; j <= n_w; ++j) ids[i][j] = w.add(rot90(leg[i][j], copy));
    for (int i = 0; i < n_s; ++i)
      for (int j = 0; j < n_w; ++j) {
        const int a = ids[i][j], b = ids[i + 1][j], c = ids[i + 1][j + 1],
                  d = ids[i][j + 1];
        if ((w.v[a] - w.v[c]).squaredNorm() <= (w.v[b] - w.v[d]).squaredNorm()) {
          w.add_tri(a, b, c);
          w.add_tri(a, c, d);
        } else {
          w.add_tri(a, b, d);
          w.add_tri(b, c, d);
        }
      }
    rim_arcs[copy] = ids[0];
  }

  // Cap rim ring: the four strip interfaces plus uniform fillers in between,
  // ordered by longitude.
  std::vector<std::pair<double, int>> rim;
  for (int copy = 0; copy < 4; ++copy)
    for (int id : rim_arcs[copy]) {
      double phi = std::atan2(w.v[id][1], w.v[id][0]);
      if (phi < 0) phi += 2.0 * kPi;
      rim.push_back({phi, id});
    }
  std::sort(rim.begin(), rim.end());
  const double st_eps = std::sin(theta_eps), ct_eps = std::cos(theta_eps);
  std::vector<std::pair<double, int>> fillers;
  for (size_t i = 0; i < rim.size(); ++i) {
    const double phi_a = rim[i].first;
    const double phi_b = (i + 1 < rim.size()) ? rim[i + 1].first : rim[0].first + 2 * kPi;
    const double arc = (phi_b - phi_a) * st_eps;
    const int nf = static_cast<int>(std::floor(arc / h));
    if (arc < 1.8 * h) continue;
    for (int k = 1; k <= nf; ++k) {
      const double phi = phi_a + (phi_b - phi_a) * k / (nf + 1);
      fillers.push_back(
          {phi, w.add({st_eps * std::cos(phi), st_eps * std::sin(phi), ct_eps})});
    }
  }
  rim.insert(rim.end(), fillers.begin(), fillers.end());
  std::sort(rim.begin(), rim.end());
  std::vector<int> rim_ring;
  for (auto& [phi, id] : rim) rim_ring.push_back(id);

  // Interior cap rings, then stitch onto the rim ring (mixed spacing).
  const int m = std::max<int>(2, std::lround(theta_eps / h));
  const int pole = w.add({0.0, 0.0, 1.0});
  std::vector<int> prev;
  for (int j = 1; j < m; ++j) {
    const double t = theta_eps * j / m;
    const int N = 4 * std::max<int>(1, std::lround(kPi * std::sin(t) / (2.0 * h)));
    std::vector<int> ring(N);
    const int quarter = N / 4;
    for (int k = 0; k < quarter; ++k) {
      const double phi = 2.0 * kPi * k / N;
      const Eigen::Vector3d base{std::sin(t) * std::cos(phi), std::sin(t) * std::sin(phi),
                                 std::cos(t)};
      for (int Q = 0; Q < 4; ++Q) ring[Q * quarter + k] = w.add(rot90(base, Q));
    }
    if (j == 1)
      for (int k = 0; k < N; ++k) w.add_tri(pole, ring[k], ring[(k + 1) % N]);
    else {
      // two-pointer band between prev and ring
      const int nA = static_cast<int>(prev.size()), nB = N;
      int i2 = 0, j2 = 0;
      while (i2 < nA || j2 < nB) {
        const int a0 = prev[i2 % nA], a1 = prev[(i2 + 1) % nA];
        const int b0 = ring[j2 % nB], b1 = ring[(j2 + 1) % nB];
        bool adv_a;
        if (i2 == nA)
          adv_a = false;
        else if (j2 == nB)
          adv_a = true;
        else
          adv_a = (w.v[a1] - w.v[b0]).squaredNorm() <= (w.v[a0] - w.v[b1]).squaredNorm();
        if (adv_a) {
          w.add_tri(a0, a1, b0);
          ++i2;
        } else {
          w.add_tri(a0, b0, b1);
          ++j2;
        }
      }
    }
    prev = std::move(ring);
  }
  {
    const int nA = static_cast<int>(prev.size()), nB = static_cast<int>(rim_ring.size());
    int i2 = 0, j2 = 0;
    // align rim start with prev start by longitude
    int j0 = 0;
    double best = 1e300;
    for (int j = 0; j < nB; ++j) {
      const double d = (w.v[prev[0]] - w.v[rim_ring[j]]).squaredNorm();
      if (d < best) {
        best = d;
        j0 = j;
      }
    }
    while (i2 < nA || j2 < nB) {
      const int a0 = prev[i2 % nA], a1 = prev[(i2 + 1) % nA];
      const int b0 = rim_ring[(j2 + j0) % nB], b1 = rim_ring[(j2 + j0 + 1) % nB];
      bool adv_a;
      if (i2 == nA)
        adv_a = false;
      else if (j2 == nB)
        adv_a = true;
      else
        adv_a = (w.v[a1] - w.v[b0]).squaredNorm() <= (w.v[a0] - w.v[b1]).squaredNorm();
      if (adv_a) {
        w.add_tri(a0, a1, b0);
        ++i2;
      } else {
        w.add_tri(a0, b0, b1);
        ++j2;
      }
    }
  }

  // Orientation + boundary extraction; boundary components are the four notches.
  SurfaceMesh mesh;
  mesh.vertices = std::move(w.v);
  mesh.triangles = std::move(w.tri);
  mesh.h = h;
  for (auto& t : mesh.triangles) {
    const Eigen::Vector3d c =
        (mesh.vertices[t[0]] + mesh.vertices[t[1]] + mesh.vertices[t[2]]) / 3.0;
    const Eigen::Vector3d n = (mesh.vertices[t[1]] - mesh.vertices[t[0]])
                                  .cross(mesh.vertices[t[2]] - mesh.vertices[t[0]]);
    if (n.dot(c) < 0.0) std::swap(t[1], t[2]);
  }
  std::map<std::pair<int, int>, int> edge_count;
  for (const auto& t : mesh.triangles)
    for (int i = 0; i < 3; ++i) {
      const int a = t[i], b = t[(i + 1) % 3];
      edge_count[{std::min(a, b), std::max(a, b)}]++;
    }
  for (const auto& [e, c] : edge_count)
    if (c == 1) {
      const Eigen::Vector3d mid =
          0.5 * (mesh.vertices[e.first] + mesh.vertices[e.second]);
      double phi = std::atan2(mid[1], mid[0]);
      if (phi < 0) phi += 2 * kPi;
      // notches sit between the strips, around longitudes pi/4 + k pi/2
      const int tag = static_cast<int>(std::floor(phi / (kPi / 2))) % 4;
      mesh.boundary_edges.push_back({e.first, e.second, tag});
    }
  return mesh;
}

} // namespace capspec
