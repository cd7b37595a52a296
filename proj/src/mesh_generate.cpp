#include <algorithm>
#include <numeric>
#include <random>

#include "bkvem/mesh.hpp"

namespace bkvem {

PolygonalMesh generate_structured(int nx, int ny, const Rectangle& d, double perturb, unsigned seed,
                                  const BoundaryLabeler& labeler) {
  if (nx < 1 || ny < 1) throw Error("structured mesh needs nx, ny >= 1");
  if (perturb < 0.0 || perturb > 0.3) throw Error("perturb must lie in [0, 0.3]");
  const double dx = (d.x_max - d.x_min) / nx, dy = (d.y_max - d.y_min) / ny;
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::vector<Point2> v;
  v.reserve((nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) {
      Point2 p{d.x_min + i * dx, d.y_min + j * dy};
      if (i == nx) p.x = d.x_max;
      if (j == ny) p.y = d.y_max;
      if (perturb > 0 && i > 0 && i < nx && j > 0 && j < ny) {
        const double s = perturb * std::min(dx, dy);
        p.x += s * unif(rng);
        p.y += s * unif(rng);
      }
      v.push_back(p);
    }
  std::vector<std::vector<int>> cells;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int a = j * (nx + 1) + i;
      cells.push_back({a, a + 1, a + nx + 2, a + nx + 1});
    }
  return PolygonalMesh::build(std::move(v), std::move(cells), labeler);
}

PolygonalMesh generate_lshape(int n, double perturb, unsigned seed, const BoundaryLabeler& labeler) {
  if (n < 1) throw Error("L-shape mesh needs n >= 1");
  const int m = 2 * n;
  const double step = 1.0 / n;
  auto inside_cell = [&](int i, int j) {
    // cell [x_i, x_i+1] x [y_j, y_j+1]; the removed block is x >= 0, y < 0
    return !(i >= n && j < n);
  };
  std::vector<int> id((m + 1) * (m + 1), -1);
  std::vector<Point2> v;
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int j = 0; j <= m; ++j)
    for (int i = 0; i <= m; ++i) {
      bool used = false;
      for (int cj = j - 1; cj <= j; ++cj)
        for (int ci = i - 1; ci <= i; ++ci)
          if (ci >= 0 && cj >= 0 && ci < m && cj < m && inside_cell(ci, cj)) used = true;
      if (!used) continue;
      Point2 p{-1.0 + i * step, -1.0 + j * step};
      if (i == n) p.x = 0.0;
      if (j == n) p.y = 0.0;
      if (i == m) p.x = 1.0;
      if (j == m) p.y = 1.0;
      const bool on_boundary = i == 0 || j == 0 || i == m || j == m || (i == n && j <= n) ||
                               (j == n && i >= n);
      if (perturb > 0 && !on_boundary) {
        p.x += perturb * step * unif(rng);
        p.y += perturb * step * unif(rng);
      }
      id[j * (m + 1) + i] = static_cast<int>(v.size());
      v.push_back(p);
    }
  std::vector<std::vector<int>> cells;
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i) {
      if (!inside_cell(i, j)) continue;
      const int a = j * (m + 1) + i;
      cells.push_back({id[a], id[a + 1], id[a + m + 2], id[a + m + 1]});
    }
  return PolygonalMesh::build(std::move(v), std::move(cells), labeler);
}

namespace {

using Poly = std::vector<Point2>;

// Keeps the part of `poly` where dot(x - m, d) <= 0.
Poly clip_half_plane(const Poly& poly, Point2 m, Point2 d) {
  Poly out;
  const std::size_t n = poly.size();
  out.reserve(n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = poly[i], b = poly[(i + 1) % n];
    const double fa = dot(a - m, d), fb = dot(b - m, d);
    if (fa <= 0) out.push_back(a);
    if ((fa < 0 && fb > 0) || (fa > 0 && fb < 0)) {
      const double t = fa / (fa - fb);
      out.push_back(a + t * (b - a));
    }
  }
  return out;
}

struct SeedGrid {
  SeedGrid(const std::vector<Point2>& seeds, const Rectangle& d) : seeds(seeds), dom(d) {
    const double w = d.x_max - d.x_min, hgt = d.y_max - d.y_min;
    const double cell = std::sqrt(w * hgt / std::max<std::size_t>(1, seeds.size()));
    nx = std::max(1, static_cast<int>(std::ceil(w / cell)));
    ny = std::max(1, static_cast<int>(std::ceil(hgt / cell)));
    sx = w / nx;
    sy = hgt / ny;
    buckets.assign(nx * ny, {});
    for (std::size_t i = 0; i < seeds.size(); ++i) buckets[bucket(seeds[i])].push_back(static_cast<int>(i));
  }
  int bx(double x) const { return std::clamp(static_cast<int>((x - dom.x_min) / sx), 0, nx - 1); }
  int by(double y) const { return std::clamp(static_cast<int>((y - dom.y_min) / sy), 0, ny - 1); }
  int bucket(Point2 p) const { return by(p.y) * nx + bx(p.x); }

  Poly cell_of(int i) const {
    const Point2 s = seeds[i];
    Poly poly{{dom.x_min, dom.y_min}, {dom.x_max, dom.y_min}, {dom.x_max, dom.y_max}, {dom.x_min, dom.y_max}};
    const int cx = bx(s.x), cy = by(s.y);
    const double step = std::min(sx, sy);
    for (int ring = 0;; ++ring) {
      double rmax = 0.0;
      for (const Point2& p : poly) rmax = std::max(rmax, distance(p, s));
      if ((ring - 1) * step > 2.0 * rmax) break;
      if (ring > nx + ny) break;
      for (int j = cy - ring; j <= cy + ring; ++j)
        for (int k = cx - ring; k <= cx + ring; ++k) {
          if (std::max(std::abs(j - cy), std::abs(k - cx)) != ring) continue;
          if (j < 0 || k < 0 || j >= ny || k >= nx) continue;
          for (int q : buckets[j * nx + k]) {
            if (q == i) continue;
            const Point2 d = seeds[q] - s;
            poly = clip_half_plane(poly, 0.5 * (s + seeds[q]), d);
          }
        }
    }
    return poly;
  }

  const std::vector<Point2>& seeds;
  Rectangle dom;
  int nx = 1, ny = 1;
  double sx = 1, sy = 1;
  std::vector<std::vector<int>> buckets;
};

void separate_coincident(std::vector<Point2>& seeds, const Rectangle& d, std::mt19937& rng,
                         std::vector<std::string>& warnings) {
  const double tol = 1e-10 * std::hypot(d.x_max - d.x_min, d.y_max - d.y_min);
  std::vector<int> order(seeds.size());
  std::iota(order.begin(), order.end(), 0);
  std::uniform_real_distribution<double> ux(d.x_min, d.x_max), uy(d.y_min, d.y_max);
  for (int pass = 0; pass < 10; ++pass) {
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return seeds[a].x < seeds[b].x || (seeds[a].x == seeds[b].x && a < b);
    });
    bool moved = false;
    for (std::size_t i = 0; i < order.size(); ++i)
      for (std::size_t j = i + 1; j < order.size() && seeds[order[j]].x - seeds[order[i]].x <= tol; ++j)
        if (distance(seeds[order[i]], seeds[order[j]]) <= tol) {
          seeds[order[j]] = {ux(rng), uy(rng)};
          warnings.push_back("coincident seeds; reseeded seed " + std::to_string(order[j]));
          moved = true;
        }
    if (!moved) return;
  }
}

// Merges points closer than tol; returns an id per input point.
std::vector<int> merge_points(const std::vector<Point2>& pts, double tol, std::vector<Point2>& merged) {
  std::vector<int> order(pts.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return pts[a].x < pts[b].x || (pts[a].x == pts[b].x && (pts[a].y < pts[b].y || (pts[a].y == pts[b].y && a < b)));
  });
  std::vector<int> id(pts.size(), -1);
  for (std::size_t i = 0; i < order.size(); ++i) {
    const int a = order[i];
    if (id[a] >= 0) continue;
    id[a] = static_cast<int>(merged.size());
    merged.push_back(pts[a]);
    for (std::size_t j = i + 1; j < order.size() && pts[order[j]].x - pts[a].x <= tol; ++j) {
      const int b = order[j];
      if (id[b] < 0 && distance(pts[a], pts[b]) <= tol) id[b] = id[a];
    }
  }
  return id;
}

}  // namespace

PolygonalMesh voronoi_from_seeds(std::vector<Point2> seeds, const Rectangle& d, int lloyd_iters,
                                 const BoundaryLabeler& labeler, double collapse_ratio) {
  if (seeds.empty()) throw Error("voronoi mesh needs at least one seed");
  std::mt19937 rng(12345);
  std::vector<std::string> warnings;
  separate_coincident(seeds, d, rng, warnings);
  std::vector<Poly> cells(seeds.size());
  for (int it = 0;; ++it) {
    SeedGrid grid(seeds, d);
    for (std::size_t i = 0; i < seeds.size(); ++i) cells[i] = grid.cell_of(static_cast<int>(i));
    if (it >= lloyd_iters) break;
    for (std::size_t i = 0; i < seeds.size(); ++i) seeds[i] = area_centroid(cells[i]);
    separate_coincident(seeds, d, rng, warnings);
  }

  const double diag = std::hypot(d.x_max - d.x_min, d.y_max - d.y_min);
  std::vector<Point2> all;
  for (const Poly& c : cells) all.insert(all.end(), c.begin(), c.end());
  std::vector<Point2> verts;
  const std::vector<int> id = merge_points(all, 1e-9 * diag, verts);

  // Snap boundary points exactly onto the rectangle.
  const double snap = 1e-9 * diag;
  for (Point2& p : verts) {
    if (std::abs(p.x - d.x_min) < snap) p.x = d.x_min;
    if (std::abs(p.x - d.x_max) < snap) p.x = d.x_max;
    if (std::abs(p.y - d.y_min) < snap) p.y = d.y_min;
    if (std::abs(p.y - d.y_max) < snap) p.y = d.y_max;
  }

  std::vector<std::vector<int>> cell_ids;
  std::size_t k = 0;
  for (const Poly& c : cells) {
    std::vector<int> ids;
    for (std::size_t i = 0; i < c.size(); ++i, ++k) {
      const int v = id[k];
      if (ids.empty() || ids.back() != v) ids.push_back(v);
    }
    while (ids.size() > 1 && ids.front() == ids.back()) ids.pop_back();
    cell_ids.push_back(std::move(ids));
  }

  if (collapse_ratio > 0) {
    // Collapse short edges to their midpoint; repeat until none remain.
    for (bool changed = true; changed;) {
      changed = false;
      for (std::size_t c = 0; c < cell_ids.size() && !changed; ++c) {
        auto& ids = cell_ids[c];
        std::vector<Point2> pts;
        for (int v : ids) pts.push_back(verts[v]);
        const double hk = diameter(pts);
        for (std::size_t i = 0; i < ids.size() && !changed; ++i) {
          const int a = ids[i], b = ids[(i + 1) % ids.size()];
          if (distance(verts[a], verts[b]) >= collapse_ratio * hk) continue;
          // Keep boundary positions on the boundary.
          auto on_bd = [&](Point2 p) {
            return p.x == d.x_min || p.x == d.x_max || p.y == d.y_min || p.y == d.y_max;
          };
          const bool ba = on_bd(verts[a]), bb = on_bd(verts[b]);
          if (ba && bb && !(verts[a].x == verts[b].x || verts[a].y == verts[b].y)) continue;
          const bool corner_a = (verts[a].x == d.x_min || verts[a].x == d.x_max) &&
                                (verts[a].y == d.y_min || verts[a].y == d.y_max);
          const bool corner_b = (verts[b].x == d.x_min || verts[b].x == d.x_max) &&
                                (verts[b].y == d.y_min || verts[b].y == d.y_max);
          Point2 target = 0.5 * (verts[a] + verts[b]);
          if (corner_a || (ba && !bb)) target = verts[a];
          else if (corner_b || (bb && !ba)) target = verts[b];
          verts[a] = target;
          for (auto& other : cell_ids) {
            for (int& v : other)
              if (v == b) v = a;
            std::vector<int> cleaned;
            for (int v : other)
              if (cleaned.empty() || cleaned.back() != v) cleaned.push_back(v);
            while (cleaned.size() > 1 && cleaned.front() == cleaned.back()) cleaned.pop_back();
            other = std::move(cleaned);
          }
          changed = true;
        }
      }
    }
    // Drop unreferenced vertices.
    std::vector<int> remap(verts.size(), -1);
    std::vector<Point2> used;
    for (auto& ids : cell_ids)
      for (int& v : ids) {
        if (remap[v] < 0) {
          remap[v] = static_cast<int>(used.size());
          used.push_back(verts[v]);
        }
        v = remap[v];
      }
    verts = std::move(used);
  }

  PolygonalMesh mesh = PolygonalMesh::build(std::move(verts), std::move(cell_ids), labeler);
  return mesh;
}

PolygonalMesh generate_voronoi(int n_seeds, const Rectangle& d, const VoronoiOptions& opts,
                               const BoundaryLabeler& labeler) {
  if (n_seeds < 1) throw Error("voronoi mesh needs n_seeds >= 1");
  std::mt19937 rng(opts.seed);
  std::uniform_real_distribution<double> ux(d.x_min, d.x_max), uy(d.y_min, d.y_max);
  std::vector<Point2> seeds(n_seeds);
  for (auto& s : seeds) {
    const double x = ux(rng);
    s = {x, uy(rng)};
  }
  return voronoi_from_seeds(std::move(seeds), d, opts.lloyd_iters, labeler, opts.collapse_ratio);
}

}  // namespace bkvem
