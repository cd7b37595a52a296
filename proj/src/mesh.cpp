#include "bkvem/mesh.hpp"

#include <algorithm>
#include <map>
#include <numbers>
#include <sstream>

namespace bkvem {

double signed_area(std::span<const Point2> poly) {
  double a = 0.0;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) a += cross(poly[i], poly[(i + 1) % n]);
  return 0.5 * a;
}

Point2 area_centroid(std::span<const Point2> poly) {
  // Shift to the first vertex to limit cancellation.
  const Point2 o = poly[0];
  double a = 0.0, cx = 0.0, cy = 0.0;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 p = poly[i] - o, q = poly[(i + 1) % n] - o;
    const double c = cross(p, q);
    a += c;
    cx += (p.x + q.x) * c;
    cy += (p.y + q.y) * c;
  }
  return {o.x + cx / (3.0 * a), o.y + cy / (3.0 * a)};
}

double diameter(std::span<const Point2> poly) {
  double d = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i)
    for (std::size_t j = i + 1; j < poly.size(); ++j) d = std::max(d, distance(poly[i], poly[j]));
  return d;
}

bool point_in_polygon(std::span<const Point2> poly, Point2 p) {
  bool inside = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point2 a = poly[i], b = poly[j];
    if ((a.y > p.y) != (b.y > p.y) && p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x)
      inside = !inside;
  }
  return inside;
}

namespace {

bool segments_cross(Point2 a, Point2 b, Point2 c, Point2 d) {
  const double d1 = cross(b - a, c - a), d2 = cross(b - a, d - a);
  const double d3 = cross(d - c, a - c), d4 = cross(d - c, b - c);
  return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

}  // namespace

bool is_self_intersecting(std::span<const Point2> poly) {
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;
      if (segments_cross(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n])) return true;
    }
  return false;
}

std::string to_string(BoundaryLabel label) {
  switch (label) {
    case BoundaryLabel::Interior: return "interior";
    case BoundaryLabel::Clamped: return "clamped";
    case BoundaryLabel::SimplySupported: return "simply_supported";
  }
  return "?";
}

BoundaryLabel parse_boundary_label(const std::string& s) {
  if (s == "clamped" || s == "c") return BoundaryLabel::Clamped;
  if (s == "simply_supported" || s == "simply-supported" || s == "s") return BoundaryLabel::SimplySupported;
  throw Error("unknown boundary label '" + s + "'");
}

BoundaryLabeler uniform_labeler(BoundaryLabel label) {
  return [label](Point2, Point2) { return label; };
}

BoundaryLabeler example1_labeler(double x_min, double y_min) {
  return [x_min, y_min](Point2 a, Point2 b) {
    const double tol = 1e-10;
    const bool on_x = std::abs(a.x - x_min) < tol && std::abs(b.x - x_min) < tol;
    const bool on_y = std::abs(a.y - y_min) < tol && std::abs(b.y - y_min) < tol;
    return (on_x || on_y) ? BoundaryLabel::Clamped : BoundaryLabel::SimplySupported;
  };
}

SideStructure side_structure(std::span<const Point2> poly, double angle_tol) {
  const int n = static_cast<int>(poly.size());
  SideStructure s;
  s.is_corner.assign(n, false);
  for (int i = 0; i < n; ++i) {
    const Point2 din = poly[i] - poly[(i + n - 1) % n];
    const Point2 dout = poly[(i + 1) % n] - poly[i];
    const double turn = std::atan2(cross(din, dout), dot(din, dout));
    if (std::abs(turn) >= std::numbers::pi - angle_tol)
      throw Error("degenerate polygon: interior angle 0 or 2*pi");
    if (std::abs(turn) > angle_tol) {
      s.is_corner[i] = true;
      s.corners.push_back(i);
    }
  }
  const int nc = static_cast<int>(s.corners.size());
  if (nc < 3) throw Error("degenerate polygon: fewer than 3 corners");
  for (int j = 0; j < nc; ++j) {
    const int start = s.corners[j];
    const int next = s.corners[(j + 1) % nc];
    s.side_start.push_back(start);
    s.side_edges.push_back((next - start + n) % n);
  }
  return s;
}

std::vector<Point2> PolygonalMesh::cell_points(int c) const {
  std::vector<Point2> p;
  p.reserve(cells_[c].vertices.size());
  for (int v : cells_[c].vertices) p.push_back(vertices_[v]);
  return p;
}

PolygonalMesh PolygonalMesh::build(std::vector<Point2> vertices,
                                   std::vector<std::vector<int>> cells,
                                   const BoundaryLabeler& labeler, double angle_tol) {
  if (!labeler) return build_indexed(std::move(vertices), std::move(cells), {}, angle_tol);
  const std::vector<Point2> pts = vertices;
  auto by_id = [&pts, &labeler](int a, int b) { return labeler(pts[a], pts[b]); };
  return build_indexed(std::move(vertices), std::move(cells), by_id, angle_tol);
}

PolygonalMesh PolygonalMesh::build_indexed(std::vector<Point2> vertices,
                                           std::vector<std::vector<int>> cells,
                                           const std::function<BoundaryLabel(int, int)>& labeler,
                                           double angle_tol) {
  PolygonalMesh m;
  m.vertices_ = std::move(vertices);
  const int nv = m.num_vertices();
  for (const Point2& p : m.vertices_)
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw Error("mesh vertex is not finite");

  m.cells_.resize(cells.size());
  std::map<std::pair<int, int>, int> edge_of;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    auto& ids = cells[c];
    if (ids.size() < 3) throw Error("cell " + std::to_string(c) + " has fewer than 3 vertices");
    for (int v : ids)
      if (v < 0 || v >= nv) throw Error("cell " + std::to_string(c) + " references vertex out of range");
    {
      auto sorted = ids;
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw Error("cell " + std::to_string(c) + " repeats a vertex");
    }
    std::vector<Point2> pts;
    for (int v : ids) pts.push_back(m.vertices_[v]);
    double area = signed_area(pts);
    if (area < 0) {
      std::reverse(ids.begin(), ids.end());
      std::reverse(pts.begin(), pts.end());
      area = -area;
      m.warnings_.push_back("cell " + std::to_string(c) + " was clockwise; reversed");
    }
    if (!(area > 0)) throw Error("cell " + std::to_string(c) + " has zero area");
    if (is_self_intersecting(pts)) throw Error("cell " + std::to_string(c) + " is self-intersecting");

    Polygon& poly = m.cells_[c];
    poly.vertices = ids;
    poly.area = area;
    poly.centroid = area_centroid(pts);
    poly.diameter = diameter(pts);
    const int n = static_cast<int>(ids.size());
    for (int i = 0; i < n; ++i) {
      const int a = ids[i], b = ids[(i + 1) % n];
      const auto key = std::minmax(a, b);
      auto it = edge_of.find(key);
      if (it == edge_of.end()) {
        Edge e;
        e.v = {a, b};
        e.left = static_cast<int>(c);
        edge_of.emplace(key, m.num_edges());
        poly.edges.push_back(m.num_edges());
        poly.orientation.push_back(1);
        m.edges_.push_back(e);
      } else {
        Edge& e = m.edges_[it->second];
        if (e.right >= 0) throw Error("edge shared by more than two cells");
        if (e.v[0] != b || e.v[1] != a)
          throw Error("inconsistent orientation between cells " + std::to_string(e.left) +
                      " and " + std::to_string(c));
        e.right = static_cast<int>(c);
        poly.edges.push_back(it->second);
        poly.orientation.push_back(-1);
      }
    }
    m.h_ = std::max(m.h_, poly.diameter);
  }

  m.vertex_cells_.assign(nv, {});
  m.vertex_boundary_edges_.assign(nv, {});
  for (int c = 0; c < m.num_cells(); ++c)
    for (int v : m.cells_[c].vertices) m.vertex_cells_[v].push_back(c);

  for (int i = 0; i < m.num_edges(); ++i) {
    Edge& e = m.edges_[i];
    const Point2 a = m.vertices_[e.v[0]], b = m.vertices_[e.v[1]];
    e.length = distance(a, b);
    if (!(e.length > 0)) throw Error("zero-length edge");
    e.tangent = (1.0 / e.length) * (b - a);
    e.normal = {e.tangent.y, -e.tangent.x};
    if (e.right < 0) {
      if (!labeler) throw Error("unlabeled boundary edge");
      e.label = labeler(e.v[0], e.v[1]);
      if (e.label == BoundaryLabel::Interior) throw Error("unlabeled boundary edge");
      m.vertex_boundary_edges_[e.v[0]].push_back(i);
      m.vertex_boundary_edges_[e.v[1]].push_back(i);
    }
  }
  for (int v = 0; v < nv; ++v)
    if (m.vertex_cells_[v].empty())
      m.warnings_.push_back("vertex " + std::to_string(v) + " belongs to no cell");

  m.vertex_lengths_.assign(nv, 0.0);
  for (int v = 0; v < nv; ++v) {
    double s = 0.0;
    for (int c : m.vertex_cells_[v]) s += m.cells_[c].diameter;
    if (!m.vertex_cells_[v].empty()) m.vertex_lengths_[v] = s / m.vertex_cells_[v].size();
  }

  m.sides_.reserve(m.cells_.size());
  for (int c = 0; c < m.num_cells(); ++c) {
    try {
      m.sides_.push_back(side_structure(m.cell_points(c), angle_tol));
    } catch (const Error& err) {
      throw Error("cell " + std::to_string(c) + ": " + err.what());
    }
  }
  return m;
}

double PolygonalMesh::total_area() const {
  double a = 0.0;
  for (const auto& c : cells_) a += c.area;
  return a;
}

MeshQuality PolygonalMesh::quality() const {
  MeshQuality q;
  q.cells = num_cells();
  q.h = h_;
  q.min_edge_ratio = 1.0;
  q.ratio_histogram.assign(10, 0);
  for (int c = 0; c < num_cells(); ++c) {
    const Polygon& p = cells_[c];
    double r = 1.0;
    for (int e : p.edges) r = std::min(r, edges_[e].length / p.diameter);
    q.min_edge_ratio = std::min(q.min_edge_ratio, r);
    if (r < 0.05) ++q.cells_below_ratio;
    q.ratio_histogram[std::min(9, static_cast<int>(r * 10))]++;
    const int nv = static_cast<int>(p.vertices.size());
    if (static_cast<int>(q.valence_histogram.size()) <= nv) q.valence_histogram.resize(nv + 1, 0);
    q.valence_histogram[nv]++;
    for (int i = 0; i < nv; ++i) {
      const Point2 a = vertices_[p.vertices[i]], b = vertices_[p.vertices[(i + 1) % nv]];
      if (cross(a - p.centroid, b - p.centroid) <= 1e-12 * p.area) {
        ++q.non_star_cells;
        break;
      }
    }
  }
  return q;
}

}  // namespace bkvem
