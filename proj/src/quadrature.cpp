#include "bkvem/quadrature.hpp"

#include <algorithm>
#include <numbers>

namespace bkvem {

void QuadratureRule::append(const QuadratureRule& other) {
  points.insert(points.end(), other.points.begin(), other.points.end());
  weights.insert(weights.end(), other.weights.begin(), other.weights.end());
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw Error("gauss_legendre needs n >= 1");
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int j = 2; j <= n; ++j) {
      const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    weights[i] = weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) nodes[n / 2] = 0.0;
}

namespace {

int points_for_order(int order) { return std::max(1, (order + 2) / 2); }

}  // namespace

LineRule line_rule(int order) {
  std::vector<double> x, w;
  gauss_legendre(points_for_order(order), x, w);
  LineRule r;
  for (std::size_t i = 0; i < x.size(); ++i) {
    r.xi.push_back(0.5 * x[i]);
    r.weights.push_back(0.5 * w[i]);
  }
  return r;
}

QuadratureRule edge_rule(Point2 a, Point2 b, int order) {
  const LineRule lr = line_rule(order);
  const double len = distance(a, b);
  QuadratureRule r;
  for (std::size_t i = 0; i < lr.xi.size(); ++i) {
    const double s = lr.xi[i] + 0.5;
    r.points.push_back(a + s * (b - a));
    r.weights.push_back(len * lr.weights[i]);
  }
  return r;
}

QuadratureRule triangle_rule(Point2 a, Point2 b, Point2 c, int order) {
  // Collapsed tensor Gauss rule: s = u (1 - v), t = u v, Jacobian u.
  std::vector<double> x, w;
  const int n = points_for_order(order + 1);
  gauss_legendre(n, x, w);
  const double twice_area = cross(b - a, c - a);
  QuadratureRule r;
  r.points.reserve(n * n);
  r.weights.reserve(n * n);
  for (int i = 0; i < n; ++i) {
    const double u = 0.5 * (x[i] + 1.0);
    for (int j = 0; j < n; ++j) {
      const double v = 0.5 * (x[j] + 1.0);
      const double s = u * (1.0 - v), t = u * v;
      r.points.push_back(a + s * (b - a) + t * (c - a));
      r.weights.push_back(0.25 * w[i] * w[j] * u * twice_area);
    }
  }
  return r;
}

std::vector<std::array<int, 3>> ear_clip(std::span<const Point2> v) {
  std::vector<int> idx(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) idx[i] = static_cast<int>(i);
  std::vector<std::array<int, 3>> tris;
  const double scale = std::max(1e-300, std::abs(signed_area(v)));
  while (idx.size() > 3) {
    bool clipped = false;
    const int m = static_cast<int>(idx.size());
    for (int i = 0; i < m && !clipped; ++i) {
      const int ip = idx[(i + m - 1) % m], ic = idx[i], in = idx[(i + 1) % m];
      const Point2 a = v[ip], b = v[ic], c = v[in];
      if (cross(b - a, c - b) <= 1e-14 * scale) continue;
      bool inside = false;
      for (int j = 0; j < m && !inside; ++j) {
        const int q = idx[j];
        if (q == ip || q == ic || q == in) continue;
        const Point2 p = v[q];
        if (cross(b - a, p - a) >= 0 && cross(c - b, p - b) >= 0 && cross(a - c, p - c) >= 0)
          inside = true;
      }
      if (inside) continue;
      tris.push_back({ip, ic, in});
      idx.erase(idx.begin() + i);
      clipped = true;
    }
    if (!clipped) throw Error("ear clipping failed: polygon is not simple");
  }
  tris.push_back({idx[0], idx[1], idx[2]});
  return tris;
}

namespace {

void add_subdivided(QuadratureRule& r, Point2 a, Point2 b, Point2 c, int order, int levels) {
  if (levels == 0) {
    r.append(triangle_rule(a, b, c, order));
    return;
  }
  const Point2 ab = 0.5 * (a + b), bc = 0.5 * (b + c), ca = 0.5 * (c + a);
  add_subdivided(r, a, ab, ca, order, levels - 1);
  add_subdivided(r, ab, b, bc, order, levels - 1);
  add_subdivided(r, ca, bc, c, order, levels - 1);
  add_subdivided(r, ab, bc, ca, order, levels - 1);
}

}  // namespace

QuadratureRule polygon_rule(std::span<const Point2> v, Point2 center, int order,
                            int subdivisions) {
  const std::size_t n = v.size();
  const double area = signed_area(v);
  bool fan_ok = true;
  for (std::size_t i = 0; i < n; ++i) {
    if (cross(v[i] - center, v[(i + 1) % n] - center) <= 1e-12 * area) {
      fan_ok = false;
      break;
    }
  }
  QuadratureRule r;
  if (fan_ok) {
    for (std::size_t i = 0; i < n; ++i)
      add_subdivided(r, center, v[i], v[(i + 1) % n], order, subdivisions);
  } else {
    for (const auto& t : ear_clip(v)) add_subdivided(r, v[t[0]], v[t[1]], v[t[2]], order, subdivisions);
  }
  return r;
}

}  // namespace bkvem
