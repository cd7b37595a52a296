#include "bkvem/spaces.hpp"

#include "bkvem/polynomial.hpp"
#include "bkvem/quadrature.hpp"

namespace bkvem {

std::string to_string(Family f) { return f == Family::Conforming ? "conforming" : "nonconforming"; }

Family parse_family(const std::string& s) {
  if (s == "conforming" || s == "c") return Family::Conforming;
  if (s == "nonconforming" || s == "nc") return Family::Nonconforming;
  throw Error("unknown family '" + s + "'");
}

EntityDofs entity_dofs(SpaceKind s) {
  const int d = s.degree;
  EntityDofs e;
  if (s.field == Field::Deflection) {
    if (d < 2) throw Error("deflection degree must be >= 2");
    if (s.family == Family::Conforming) {
      e.per_vertex = 3;
      e.edge_normal = d - 2;
      e.edge_value = std::max(d - 3, 0);
    } else {
      e.per_vertex = 1;
      e.edge_normal = d - 1;
      e.edge_value = d - 2;
    }
    e.per_cell = poly_dim(d - 4);
  } else {
    if (d < 1) throw Error("pressure degree must be >= 1");
    if (s.family == Family::Conforming) {
      e.per_vertex = 1;
      e.edge_value = d - 1;
    } else {
      e.edge_value = d;
    }
    e.per_cell = poly_dim(d - 2);
  }
  return e;
}

int local_dof_count(SpaceKind s, int n) {
  const EntityDofs e = entity_dofs(s);
  return n * (e.per_vertex + e.per_edge()) + e.per_cell;
}

std::vector<DofDescriptor> local_dofs(SpaceKind s, const PolygonalMesh& mesh, int cell) {
  const EntityDofs e = entity_dofs(s);
  const Polygon& p = mesh.cell(cell);
  std::vector<DofDescriptor> out;
  for (int v : p.vertices) {
    const double hv = mesh.vertex_lengths()[v];
    if (e.per_vertex >= 1) out.push_back({DofKind::VertexValue, v, 0, hv});
    if (e.per_vertex == 3) {
      out.push_back({DofKind::VertexGradX, v, 0, hv});
      out.push_back({DofKind::VertexGradY, v, 1, hv});
    }
  }
  for (int ed : p.edges) {
    const double he = mesh.edge(ed).length;
    for (int j = 0; j < e.edge_normal; ++j) out.push_back({DofKind::EdgeNormalMoment, ed, j, he});
    for (int j = 0; j < e.edge_value; ++j) out.push_back({DofKind::EdgeValueMoment, ed, j, he});
  }
  for (int a = 0; a < e.per_cell; ++a) out.push_back({DofKind::CellMoment, cell, a, p.diameter});
  return out;
}

int DofMap::num_constrained() const {
  int n = 0;
  for (char c : constrained) n += c ? 1 : 0;
  return n;
}

DofMap build_dof_map(const PolygonalMesh& mesh, SpaceKind s) {
  const EntityDofs e = entity_dofs(s);
  DofMap m;
  m.space = s;
  const int vertex_off = 0;
  const int edge_off = vertex_off + mesh.num_vertices() * e.per_vertex;
  const int cell_off = edge_off + mesh.num_edges() * e.per_edge();
  m.total = cell_off + mesh.num_cells() * e.per_cell;
  m.cell_dofs.resize(mesh.num_cells());
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const Polygon& p = mesh.cell(c);
    auto& d = m.cell_dofs[c];
    for (int v : p.vertices)
      for (int i = 0; i < e.per_vertex; ++i) d.push_back(vertex_off + v * e.per_vertex + i);
    for (int ed : p.edges)
      for (int i = 0; i < e.per_edge(); ++i) d.push_back(edge_off + ed * e.per_edge() + i);
    for (int i = 0; i < e.per_cell; ++i) d.push_back(cell_off + c * e.per_cell + i);
  }
  m.constrained.assign(m.total, 0);
  m.prescribed.assign(m.total, 0.0);
  return m;
}

namespace {

// Global index of entity DoFs, mirroring build_dof_map.
struct Numbering {
  EntityDofs e;
  int edge_off, cell_off;
  Numbering(const PolygonalMesh& mesh, SpaceKind s) : e(entity_dofs(s)) {
    edge_off = mesh.num_vertices() * e.per_vertex;
    cell_off = edge_off + mesh.num_edges() * e.per_edge();
  }
  int vertex(int v, int i) const { return v * e.per_vertex + i; }
  int edge_normal(int ed, int j) const { return edge_off + ed * e.per_edge() + j; }
  int edge_value(int ed, int j) const { return edge_off + ed * e.per_edge() + e.edge_normal + j; }
  int cell(int c, int a) const { return cell_off + c * e.per_cell + a; }
};

}  // namespace

Eigen::VectorXd interpolate(const DofMap& map, const PolygonalMesh& mesh, const ScalarField& f,
                            int order) {
  const Numbering num(mesh, map.space);
  const EntityDofs& e = num.e;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(map.total);
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    if (e.per_vertex == 0) break;
    const Point2 p = mesh.vertex(v);
    x[num.vertex(v, 0)] = f.value(p);
    if (e.per_vertex == 3) {
      const Point2 g = f.gradient(p);
      const double hv = mesh.vertex_lengths()[v];
      x[num.vertex(v, 1)] = hv * g.x;
      x[num.vertex(v, 2)] = hv * g.y;
    }
  }
  const LineRule lr = line_rule(order);
  for (int ed = 0; ed < mesh.num_edges(); ++ed) {
    const Edge& edge = mesh.edge(ed);
    const Point2 a = mesh.vertex(edge.v[0]), b = mesh.vertex(edge.v[1]);
    for (std::size_t q = 0; q < lr.xi.size(); ++q) {
      const double xi = lr.xi[q];
      const Point2 p = a + (xi + 0.5) * (b - a);
      const double w = lr.weights[q];
      if (e.edge_normal > 0) {
        const double dn = dot(f.gradient(p), edge.normal);
        for (int j = 0; j < e.edge_normal; ++j)
          x[num.edge_normal(ed, j)] += edge.length * w * dn * edge_monomial(xi, j);
      }
      if (e.edge_value > 0) {
        const double val = f.value(p);
        for (int j = 0; j < e.edge_value; ++j) x[num.edge_value(ed, j)] += w * val * edge_monomial(xi, j);
      }
    }
  }
  if (e.per_cell > 0) {
    const int deg = map.space.field == Field::Deflection ? map.space.degree - 4 : map.space.degree - 2;
    for (int c = 0; c < mesh.num_cells(); ++c) {
      const Polygon& poly = mesh.cell(c);
      const ScaledMonomialBasis basis(poly.centroid, poly.diameter, deg);
      const auto pts = mesh.cell_points(c);
      const QuadratureRule r = polygon_rule(pts, poly.centroid, order + deg);
      Eigen::VectorXd mom = Eigen::VectorXd::Zero(basis.size());
      for (std::size_t q = 0; q < r.size(); ++q) mom += r.weights[q] * f.value(r.points[q]) * basis.eval(r.points[q]);
      for (int a = 0; a < e.per_cell; ++a) x[num.cell(c, a)] = mom[a] / poly.area;
    }
  }
  return x;
}

void apply_essential_bc(DofMap& map, const PolygonalMesh& mesh, const EssentialBc& bc) {
  const Numbering num(mesh, map.space);
  const EntityDofs& e = num.e;
  const SpaceKind s = map.space;
  auto fix = [&map](int i) { map.constrained[i] = 1; };

  for (int ed = 0; ed < mesh.num_edges(); ++ed) {
    const Edge& edge = mesh.edge(ed);
    if (edge.right >= 0) continue;
    if (edge.label == BoundaryLabel::Interior) throw Error("unlabeled boundary edge");
    const bool clamped = edge.label == BoundaryLabel::Clamped;
    if (s.field == Field::Deflection) {
      for (int v : edge.v) fix(num.vertex(v, 0));
      if (clamped)
        for (int j = 0; j < e.edge_normal; ++j) fix(num.edge_normal(ed, j));
      for (int j = 0; j < e.edge_value; ++j) fix(num.edge_value(ed, j));
    } else {
      if (clamped && !bc.pressure_dirichlet_everywhere) continue;
      for (int v : edge.v)
        if (e.per_vertex > 0) fix(num.vertex(v, 0));
      for (int j = 0; j < e.edge_value; ++j) fix(num.edge_value(ed, j));
    }
  }

  if (s.field == Field::Deflection && s.family == Family::Conforming) {
    for (int v = 0; v < mesh.num_vertices(); ++v) {
      const auto& bes = mesh.vertex_boundary_edges(v);
      if (bes.empty()) continue;
      bool clamped = false;
      for (int ed : bes) clamped = clamped || mesh.edge(ed).label == BoundaryLabel::Clamped;
      const Point2 t0 = mesh.edge(bes[0]).tangent;
      bool straight = bes.size() == 2 && std::abs(cross(t0, mesh.edge(bes[1]).tangent)) < 1e-10;
      if (clamped || !straight) {
        fix(num.vertex(v, 1));
        fix(num.vertex(v, 2));
      } else if (std::abs(t0.y) < 1e-12) {
        fix(num.vertex(v, 1));  // tangential derivative along a horizontal side
      } else if (std::abs(t0.x) < 1e-12) {
        fix(num.vertex(v, 2));
      } else {
        throw Error("simply supported boundary must be axis-aligned for the conforming deflection space");
      }
    }
  }

  if (bc.exact.value) {
    const Eigen::VectorXd vals = interpolate(map, mesh, bc.exact, bc.quadrature_order);
    for (int i = 0; i < map.total; ++i) map.prescribed[i] = map.constrained[i] ? vals[i] : 0.0;
  } else {
    std::fill(map.prescribed.begin(), map.prescribed.end(), 0.0);
  }
}

}  // namespace bkvem
