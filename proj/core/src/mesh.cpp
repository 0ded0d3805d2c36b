#include "capspec/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <ostream>
#include <unordered_map>

#include "capspec/hole_models.hpp"

namespace capspec {

double SurfaceMesh::area() const {
  double a = 0.0;
  for (const auto& t : triangles) {
    const Eigen::Vector3d e1 = vertices[t[1]] - vertices[t[0]];
    const Eigen::Vector3d e2 = vertices[t[2]] - vertices[t[0]];
    a += 0.5 * e1.cross(e2).norm();
  }
  return a;
}

double SurfaceMesh::boundary_length(int tag) const {
  double len = 0.0;
  for (const auto& e : boundary_edges)
    if (e.tag == tag) len += (vertices[e.a] - vertices[e.b]).norm();
  return len;
}

int SurfaceMesh::boundary_component_count() const {
  int maxtag = -1;
  for (const auto& e : boundary_edges) maxtag = std::max(maxtag, e.tag);
  return maxtag + (boundary_edges.empty() ? 0 : 1);
}

void SurfaceMesh::validate() const {
  for (size_t i = 0; i < vertices.size(); ++i)
    if (std::abs(vertices[i].norm() - 1.0) > 1e-12)
      throw GeometryError("validate: vertex " + std::to_string(i) + " off the sphere by " +
                          fmt_sig(vertices[i].norm() - 1.0, 3));

  std::map<std::pair<int, int>, int> edge_count;
  std::map<std::pair<int, int>, int> oriented;
  for (size_t k = 0; k < triangles.size(); ++k) {
    const auto& t = triangles[k];
    const Eigen::Vector3d e1 = vertices[t[1]] - vertices[t[0]];
    const Eigen::Vector3d e2 = vertices[t[2]] - vertices[t[0]];
    if (0.5 * e1.cross(e2).norm() <= 1e-16)
      throw GeometryError("validate: degenerate triangle " + std::to_string(k));
    for (int i = 0; i < 3; ++i) {
      const int a = t[i], b = t[(i + 1) % 3];
      edge_count[{std::min(a, b), std::max(a, b)}]++;
      oriented[{a, b}]++;
    }
  }
  size_t nb = 0;
  for (const auto& [e, c] : edge_count) {
    if (c != 1 && c != 2)
      throw GeometryError("validate: edge (" + std::to_string(e.first) + "," +
                          std::to_string(e.second) + ") borders " + std::to_string(c) +
                          " triangles");
    if (c == 1) ++nb;
    if (c == 2 && oriented[{e.first, e.second}] != 1)
      throw GeometryError("validate: inconsistent orientation across edge (" +
                          std::to_string(e.first) + "," + std::to_string(e.second) + ")");
  }
  if (nb != boundary_edges.size())
    throw GeometryError("validate: boundary bookkeeping mismatch: " + std::to_string(nb) +
                        " one-triangle edges vs " + std::to_string(boundary_edges.size()) +
                        " recorded");
  for (const auto& e : boundary_edges)
    if (edge_count[{std::min(e.a, e.b), std::max(e.a, e.b)}] != 1)
      throw GeometryError("validate: recorded boundary edge is interior");
}

void SurfaceMesh::write_off(std::ostream& os) const {
  os << "OFF\n" << vertices.size() << " " << triangles.size() << " 0\n";
  for (const auto& v : vertices)
    os << fmt_sig(v[0]) << " " << fmt_sig(v[1]) << " " << fmt_sig(v[2]) << "\n";
  for (const auto& t : triangles) os << "3 " << t[0] << " " << t[1] << " " << t[2] << "\n";
}

Chart chart_at(double t, double phi) {
  Chart c;
  const double st = std::sin(t), ct = std::cos(t);
  c.center = {st * std::cos(phi), st * std::sin(phi), ct};
  if (st < 1e-14) {
    c.e1 = {1.0, 0.0, 0.0};
    c.e2 = {0.0, 1.0, 0.0};
  } else {
    c.e1 = {-std::sin(phi), std::cos(phi), 0.0};                       // latitude
    c.e2 = {-ct * std::cos(phi), -ct * std::sin(phi), st};             // toward north
  }
  return c;
}

double hole_area_on_sphere(double eps, double semi_major, double semi_minor) {
  const int n = 512;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const double s = 2.0 * kPi * i / n;
    const double rr = semi_major * semi_major * std::cos(s) * std::cos(s) +
                      semi_minor * semi_minor * std::sin(s) * std::sin(s);
    acc += 1.0 / (1.0 + 0.25 * eps * eps * rr);
  }
  return 0.5 * eps * eps * semi_major * semi_minor * acc * (2.0 * kPi / n);
}

namespace {

// Exact quarter turns about e3: coordinate swaps, bitwise reproducible.
Eigen::Vector3d rot90(const Eigen::Vector3d& p, int times) {
  Eigen::Vector3d q = p;
  for (int i = 0; i < ((times % 4) + 4) % 4; ++i) q = Eigen::Vector3d(-q[1], q[0], q[2]);
  return q;
}

struct Builder {
  std::vector<Eigen::Vector3d> v;
  std::vector<std::array<int, 3>> tri;

  int add(const Eigen::Vector3d& p) {
    v.push_back(p);
    return static_cast<int>(v.size()) - 1;
  }
  void add_tri(int a, int b, int c) { tri.push_back({a, b, c}); }
};

// Latitude ring with exact 4-fold symmetry; N divisible by 4.
std::vector<int> add_ring(Builder& b, double t, int N) {
  const int q = N / 4;
  std::vector<Eigen::Vector3d> base(q);
  const double st = std::sin(t), ct = std::cos(t);
  for (int k = 0; k < q; ++k) {
    const double phi = 2.0 * kPi * k / N;
    base[k] = {st * std::cos(phi), st * std::sin(phi), ct};
  }
  std::vector<int> ids(N);
  for (int Q = 0; Q < 4; ++Q)
    for (int k = 0; k < q; ++k) ids[Q * q + k] = b.add(rot90(base[k], Q));
  return ids;
}

void fan(Builder& b, int apex, const std::vector<int>& ring, bool apex_first) {
  const int n = static_cast<int>(ring.size());
  for (int i = 0; i < n; ++i) {
    const int a = ring[i], c = ring[(i + 1) % n];
    if (apex_first)
      b.add_tri(apex, a, c);
    else
      b.add_tri(apex, c, a);
  }
}

// Triangulates the band between two closed loops with the same winding sense,
// advancing whichever side has the shorter next diagonal.
void stitch(Builder& b, const std::vector<int>& A, const std::vector<int>& B,
            bool align_start) {
  const int nA = static_cast<int>(A.size()), nB = static_cast<int>(B.size());
  int j0 = 0;
  if (align_start) {
    double best = 1e300;
    for (int j = 0; j < nB; ++j) {
      const double d = (b.v[A[0]] - b.v[B[j]]).squaredNorm();
      if (d < best) {
        best = d;
        j0 = j;
      }
    }
  }
  auto pa = [&](int i) { return A[i % nA]; };
  auto pb = [&](int j) { return B[(j + j0) % nB]; };
  int i = 0, j = 0;
  while (i < nA || j < nB) {
    bool advance_a;
    if (i == nA)
      advance_a = false;
    else if (j == nB)
      advance_a = true;
    else
      advance_a = (b.v[pa(i + 1)] - b.v[pb(j)]).squaredNorm() <=
                  (b.v[pa(i)] - b.v[pb(j + 1)]).squaredNorm();
    if (advance_a) {
      b.add_tri(pa(i), pa(i + 1), pb(j));
      ++i;
    } else {
      b.add_tri(pa(i), pb(j), pb(j + 1));
      ++j;
    }
  }
}

void orient_outward(Builder& b) {
  for (auto& t : b.tri) {
    const Eigen::Vector3d c = (b.v[t[0]] + b.v[t[1]] + b.v[t[2]]) / 3.0;
    const Eigen::Vector3d n = (b.v[t[1]] - b.v[t[0]]).cross(b.v[t[2]] - b.v[t[0]]);
    if (n.dot(c) < 0.0) std::swap(t[1], t[2]);
  }
}

SurfaceMesh finalize(Builder&& b, double h,
                     const std::function<int(const Eigen::Vector3d&)>& tagger) {
  orient_outward(b);

  // Drop vertices orphaned by hole cutting; isolated vertices would make the
  // FEM mass matrix singular.
  std::vector<int> remap(b.v.size(), -1);
  std::vector<Eigen::Vector3d> packed;
  for (auto& t : b.tri)
    for (int& id : t) {
      if (remap[id] < 0) {
        remap[id] = static_cast<int>(packed.size());
        packed.push_back(b.v[id]);
      }
      id = remap[id];
    }

  SurfaceMesh m;
  m.vertices = std::move(packed);
  m.triangles = std::move(b.tri);
  m.h = h;

  std::map<std::pair<int, int>, int> edge_count;
  for (const auto& t : m.triangles)
    for (int i = 0; i < 3; ++i) {
      const int a = t[i], c = t[(i + 1) % 3];
      edge_count[{std::min(a, c), std::max(a, c)}]++;
    }
  for (const auto& [e, cnt] : edge_count)
    if (cnt == 1) {
      const Eigen::Vector3d mid = 0.5 * (m.vertices[e.first] + m.vertices[e.second]);
      m.boundary_edges.push_back({e.first, e.second, tagger(mid)});
    }
  return m;
}

int ring_count(double t, double h) {
  return 4 * std::max<int>(1, std::lround(kPi * std::sin(t) / (2.0 * h)));
}

void check_mesh_budget(double theta, double h) {
  const double est = 2.0 * kPi * (1.0 - std::cos(theta)) / (0.43 * h * h);
  if (est > 5e6)
    throw ResourceError("mesh_cap: about " + fmt_sig(est, 3) +
                        " vertices requested; refusing beyond 5e6");
}

struct CapRings {
  Builder b;
  std::vector<int> last_ring;  // empty when the mesh closed at the south pole
};

// Rings from the north pole down to aperture theta; m latitude intervals.
CapRings build_cap_rings(double theta, double h, int m) {
  CapRings out;
  const int pole = out.b.add({0.0, 0.0, 1.0});
  std::vector<int> prev;
  for (int j = 1; j <= m; ++j) {
    const double t = theta * j / m;
    if (t > kPi - 1e-9) {
      const int south = out.b.add({0.0, 0.0, -1.0});
      fan(out.b, south, prev, false);
      out.last_ring.clear();
      return out;
    }
    std::vector<int> ring = add_ring(out.b, t, ring_count(t, h));
    if (j == 1)
      fan(out.b, pole, ring, true);
    else
      stitch(out.b, prev, ring, false);
    prev = std::move(ring);
  }
  out.last_ring = std::move(prev);
  return out;
}

} // namespace

SurfaceMesh mesh_cap(double theta, double h) {
  if (!(theta > 0.0) || theta > kPi + 1e-12)
    throw DomainError("mesh_cap: theta must lie in (0, pi]");
  if (!(h > 0.0) || !(h < 0.5)) throw DomainError("mesh_cap: h must lie in (0, 0.5)");
  check_mesh_budget(theta, h);

  const int m = std::max<int>(1, std::lround(theta / h));
  CapRings rings = build_cap_rings(std::min(theta, kPi), h, m);
  return finalize(std::move(rings.b), h, [](const Eigen::Vector3d&) { return 0; });
}

namespace {

struct HoleLayout {
  Chart chart;         // chart of hole 0 (or the only hole)
  int copies = 1;      // 1 or 4 (replicated by exact quarter turns)
  double a = 0.0;      // chart semi-axes, already scaled by eps
  double b = 0.0;
  double h_near = 0.0;
};

// Chart coordinates of p relative to hole copy k (exact-rotation reduction).
Eigen::Vector2d hole_frame(const HoleLayout& hl, const Eigen::Vector3d& p, int k) {
  return hl.chart.inv(rot90(p, 4 - k));
}

struct Collar {
  std::vector<std::vector<int>> rings;  // innermost = the hole boundary
  double r_outer = 0.0;
};

// Graded rings from the ellipse out to a circle, polar-radius blended.
Collar add_collar(Builder& b, const HoleLayout& hl, int copy, double h_far,
                  double r_allowed) {
  const double eb = hl.b;
  std::vector<double> gaps;
  double reach = 0.0;
  for (double g = hl.h_near;; g = std::min(g * 1.3, 0.9 * h_far)) {
    gaps.push_back(g);
    reach += g;
    if (g >= 0.9 * h_far - 1e-15 && eb + reach >= 1.35 * hl.a) break;
    if (eb + reach > r_allowed) break;
    if (gaps.size() > 200) break;
  }
  const double r_outer = std::min(eb + reach, r_allowed);
  if (r_outer < 1.15 * hl.a)
    throw GeometryError("mesh: holes too large or too close; no room for a collar");

  auto polar_ellipse = [&](double psi) {
    const double c = std::cos(psi), s = std::sin(psi);
    return hl.a * hl.b / std::sqrt(hl.b * hl.b * c * c + hl.a * hl.a * s * s);
  };

  Collar col;
  col.r_outer = r_outer;
  const double D = r_outer - eb;
  double sigma = 0.0;
  std::vector<double> sigmas = {0.0};
  for (double g : gaps) {
    sigma = std::min(1.0, sigma + g / D);
    sigmas.push_back(sigma);
    if (sigma >= 1.0) break;
  }
  if (sigmas.back() < 1.0) sigmas.push_back(1.0);

  for (size_t i = 0; i < sigmas.size(); ++i) {
    const double s = sigmas[i];
    int N;
    if (i == 0) {
      N = 64;  // the hole boundary polygon
    } else {
      const double rbar = (1.0 - s) * 0.5 * (hl.a + hl.b) + s * r_outer;
      const double seg = std::min(0.9 * h_far, std::max(hl.h_near, (i < gaps.size() ? gaps[i] : gaps.back())));
      N = std::max(16, 4 * static_cast<int>(std::lround(0.5 * kPi * rbar / seg)));
    }
    std::vector<int> ring(N);
    for (int k = 0; k < N; ++k) {
      const double psi = 2.0 * kPi * k / N;
      const double r = (1.0 - s) * polar_ellipse(psi) + s * r_outer;
      const Eigen::Vector2d z{r * std::cos(psi), r * std::sin(psi)};
      ring[k] = b.add(rot90(hl.chart.map(z), copy));
    }
    col.rings.push_back(std::move(ring));
  }
  for (size_t i = 0; i + 1 < col.rings.size(); ++i)
    stitch(b, col.rings[i + 1], col.rings[i], true);
  return col;
}

// Boundary loops of the kept triangles, chained from oriented edges.
std::vector<std::vector<int>> boundary_loops(const Builder& b,
                                             const std::vector<char>& keep) {
  std::map<std::pair<int, int>, int> count;
  for (size_t k = 0; k < b.tri.size(); ++k) {
    if (!keep[k]) continue;
    const auto& t = b.tri[k];
    for (int i = 0; i < 3; ++i)
      count[{std::min(t[i], t[(i + 1) % 3]), std::max(t[i], t[(i + 1) % 3])}]++;
  }
  std::unordered_map<int, int> succ;
  for (size_t k = 0; k < b.tri.size(); ++k) {
    if (!keep[k]) continue;
    const auto& t = b.tri[k];
    for (int i = 0; i < 3; ++i) {
      const int a = t[i], c = t[(i + 1) % 3];
      if (count[{std::min(a, c), std::max(a, c)}] == 1) succ[a] = c;
    }
  }
  std::vector<std::vector<int>> loops;
  std::unordered_map<int, char> used;
  for (const auto& [start, next] : succ) {
    if (used.count(start)) continue;
    std::vector<int> loop;
    int cur = start;
    while (!used.count(cur)) {
      used[cur] = 1;
      loop.push_back(cur);
      auto it = succ.find(cur);
      if (it == succ.end()) throw GeometryError("mesh: open boundary chain");
      cur = it->second;
    }
    if (cur != start) throw GeometryError("mesh: boundary chain does not close");
    loops.push_back(std::move(loop));
  }
  return loops;
}

SurfaceMesh build_punctured(double theta_cap, int m_rings, const HoleLayout& hl,
                            double h_far) {
  Builder b;
  const bool closed = theta_cap > kPi - 1e-9;
  CapRings rings = build_cap_rings(closed ? kPi : theta_cap, h_far, m_rings);
  b = std::move(rings.b);
  orient_outward(b);

  // Cut around each hole copy: drop triangles with a vertex inside r_cut.
  std::vector<double> grade(b.v.size(), 1e300);  // min chart radius over copies
  for (size_t i = 0; i < b.v.size(); ++i)
    for (int k = 0; k < hl.copies; ++k) {
      if (b.v[i].dot(rot90(hl.chart.center, k)) < -0.2) continue;  // far side
      grade[i] = std::min(grade[i], hole_frame(hl, b.v[i], k).norm());
    }

  // r_allowed: nearest structure in chart units (neighbor holes, rims, pole).
  double r_allowed = 1.2;  // generous cap for the single-hole case
  if (hl.copies == 4) {
    const Eigen::Vector3d c0 = hl.chart.center;
    const Eigen::Vector3d c1 = rot90(c0, 1);
    const double geo = std::acos(std::clamp(c0.dot(c1), -1.0, 1.0));
    r_allowed = std::min(r_allowed, 0.9 * std::tan(geo / 2.0));
    const double t_hole = std::acos(std::clamp(c0[2], -1.0, 1.0));
    const double to_rim = theta_cap - t_hole, to_pole = t_hole;
    r_allowed = std::min({r_allowed, 0.6 * 2.0 * std::tan(to_rim / 2.0),
                          0.6 * 2.0 * std::tan(to_pole / 2.0)});
  }

  // Provisional collar to learn its outer radius before cutting.
  Builder probe;
  Collar col0 = add_collar(probe, hl, 0, h_far, r_allowed);
  const double r_cut = col0.r_outer + 0.55 * h_far;

  std::vector<char> keep(b.tri.size(), 1);
  for (size_t k = 0; k < b.tri.size(); ++k)
    for (int i = 0; i < 3; ++i)
      if (grade[b.tri[k][i]] < r_cut) {
        keep[k] = 0;
        break;
      }

  std::vector<std::vector<int>> loops = boundary_loops(b, keep);

  // Identify each cut loop with its hole copy. The cap rim loop is recognized
  // exactly: its vertices sit at the rim latitude.
  const double rim_z_exact = std::cos(theta_cap);
  std::vector<std::vector<int>> hole_loop(hl.copies);
  for (auto& loop : loops) {
    bool is_rim = false;
    for (int id : loop)
      if (std::abs(b.v[id][2] - rim_z_exact) < 1e-9) {
        is_rim = true;
        break;
      }
    if (is_rim) {
      if (closed) throw GeometryError("mesh: unexpected rim loop on a closed sphere");
      for (int id : loop)
        if (grade[id] < r_cut)
          throw GeometryError("mesh: hole cut reached the cap rim; holes too large");
      continue;
    }
    const Eigen::Vector3d p = b.v[loop.front()];
    int copy = 0;
    double best = 1e300;
    for (int k = 0; k < hl.copies; ++k) {
      const double d = (p - rot90(hl.chart.center, k)).norm();
      if (d < best) {
        best = d;
        copy = k;
      }
    }
    if (!hole_loop[copy].empty())
      throw GeometryError("mesh: hole cut produced multiple loops");
    hole_loop[copy] = std::move(loop);
  }
  for (int k = 0; k < hl.copies; ++k)
    if (hole_loop[k].empty()) throw GeometryError("mesh: hole cut removed nothing");

  // Compact the kept triangles.
  std::vector<std::array<int, 3>> kept;
  for (size_t k = 0; k < b.tri.size(); ++k)
    if (keep[k]) kept.push_back(b.tri[k]);
  b.tri = std::move(kept);

  // Canonical start + counterclockwise winding in the chart, per copy.
  for (int k = 0; k < hl.copies; ++k) {
    auto& loop = hole_loop[k];
    double signed_area = 0.0;
    size_t start = 0;
    double best = 1e300;
    std::vector<Eigen::Vector2d> z(loop.size());
    for (size_t i = 0; i < loop.size(); ++i) z[i] = hole_frame(hl, b.v[loop[i]], k);
    for (size_t i = 0; i < loop.size(); ++i) {
      const auto& p = z[i];
      const auto& q = z[(i + 1) % loop.size()];
      signed_area += p[0] * q[1] - p[1] * q[0];
      const double ang = std::atan2(p[1], p[0]);
      if (ang < best) {
        best = ang;
        start = i;
      }
    }
    std::rotate(loop.begin(), loop.begin() + start, loop.end());
    if (signed_area < 0.0) std::reverse(loop.begin(), loop.end());
  }

  for (int k = 0; k < hl.copies; ++k) {
    const Collar col = add_collar(b, hl, k, h_far, r_allowed);
    stitch(b, hole_loop[k], col.rings.back(), true);
  }

  const double rim_z = std::cos(theta_cap);
  const HoleLayout hcopy = hl;
  auto tagger = [hcopy, r_cut, rim_z, closed](const Eigen::Vector3d& mid) {
    for (int k = 0; k < hcopy.copies; ++k) {
      if (mid.dot(rot90(hcopy.chart.center, k)) < -0.2) continue;
      if (hole_frame(hcopy, mid, k).norm() < 0.8 * r_cut) return k + 1;
    }
    if (!closed && std::abs(mid[2] - rim_z) < 0.5) return 0;
    throw GeometryError("mesh: unclassifiable boundary edge");
  };
  return finalize(std::move(b), h_far, tagger);
}

} // namespace

SurfaceMesh mesh_punctured_cap(double theta, double t, double lambda, double eps,
                               double h_far, double h_near) {
  if (!(theta > 0.0) || !(theta < kPi))
    throw DomainError("mesh_punctured_cap: theta must lie in (0, pi)");
  if (!(t > 0.0) || !(t < theta))
    throw DomainError("mesh_punctured_cap: need 0 < t < theta");
  if (!(eps >= 0.0)) throw DomainError("mesh_punctured_cap: eps must be >= 0");
  if (eps > 0.0 && !(h_near <= eps / 6.0 + 1e-12))
    throw DomainError("mesh_punctured_cap: need h_near <= eps/6");

  if (eps == 0.0) return mesh_cap(theta, h_far);

  const EllipseHole ell = ellipse_from_lambda(lambda);
  const SurfaceMesh ref = mesh_cap(theta, h_far);
  const double target = ref.area();

  const double hole_area = hole_area_on_sphere(eps, ell.semi_major, ell.semi_minor);
  double cos_te = std::cos(theta) - 4.0 * hole_area / (2.0 * kPi);
  if (cos_te < -1.0)
    throw GeometryError("mesh_punctured_cap: holes exceed the available area");
  double theta_eps = std::acos(cos_te);

  HoleLayout hl;
  hl.chart = chart_at(t, 0.0);
  hl.copies = 4;
  hl.a = eps * ell.semi_major;
  hl.b = eps * ell.semi_minor;
  hl.h_near = h_near;

  const int m = std::max<int>(1, std::lround(theta_eps / h_far));
  SurfaceMesh mesh = build_punctured(theta_eps, m, hl, h_far);
  for (int it = 0; it < 3; ++it) {
    const double dA = mesh.area() - target;
    if (std::abs(dA) < 0.02 * h_far * h_far) break;
    theta_eps -= dA / (2.0 * kPi * std::sin(theta_eps));
    if (!(theta_eps > t) || !(theta_eps < kPi))
      throw GeometryError("mesh_punctured_cap: area matching left (t, pi)");
    mesh = build_punctured(theta_eps, m, hl, h_far);
  }
  return mesh;
}

SurfaceMesh mesh_sphere_with_hole(double eps, double lambda, double h_far,
                                  double h_near) {
  if (!(eps > 0.0)) throw DomainError("mesh_sphere_with_hole: eps must be > 0");
  if (!(h_near <= eps / 6.0 + 1e-12))
    throw DomainError("mesh_sphere_with_hole: need h_near <= eps/6");

  double a = 1.0, b = 1.0;
  if (std::isfinite(lambda)) {
    const EllipseHole ell = ellipse_from_lambda(lambda);
    a = ell.semi_major;
    b = ell.semi_minor;
  }
  HoleLayout hl;
  hl.chart.center = {0.0, 0.0, -1.0};
  hl.chart.e1 = {1.0, 0.0, 0.0};
  hl.chart.e2 = {0.0, 1.0, 0.0};
  hl.copies = 1;
  hl.a = eps * a;
  hl.b = eps * b;
  hl.h_near = h_near;

  const int m = std::max<int>(1, std::lround(kPi / h_far));
  return build_punctured(kPi, m, hl, h_far);
}

} // namespace capspec
