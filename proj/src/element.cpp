#include "bkvem/element.hpp"

namespace bkvem {

namespace {

void fill_edges(ElementGeometry& g) {
  const int n = g.num_vertices();
  g.edges.resize(n);
  for (int i = 0; i < n; ++i) {
    ElementEdge& e = g.edges[i];
    e.a = g.vertices[i];
    e.b = g.vertices[(i + 1) % n];
    e.length = distance(e.a, e.b);
    e.t = (1.0 / e.length) * (e.b - e.a);
    e.n = {e.t.y, -e.t.x};
  }
}

}  // namespace

ElementGeometry make_element(const PolygonalMesh& mesh, int cell, int order) {
  const Polygon& p = mesh.cell(cell);
  ElementGeometry g;
  g.cell = cell;
  g.vertex_ids = p.vertices;
  g.vertices = mesh.cell_points(cell);
  for (int v : p.vertices) g.vertex_h.push_back(mesh.vertex_lengths()[v]);
  fill_edges(g);
  for (std::size_t i = 0; i < p.edges.size(); ++i) {
    g.edges[i].global = p.edges[i];
    g.edges[i].sign = p.orientation[i];
    g.edges[i].label = mesh.edge(p.edges[i]).label;
  }
  g.sides = mesh.sides(cell);
  g.centroid = p.centroid;
  g.h = p.diameter;
  g.area = p.area;
  g.cell_rule = polygon_rule(g.vertices, g.centroid, order);
  return g;
}

ElementGeometry make_element(std::span<const Point2> polygon, int order) {
  ElementGeometry g;
  g.vertices.assign(polygon.begin(), polygon.end());
  if (signed_area(g.vertices) <= 0) throw Error("element polygon must be counter-clockwise");
  for (int i = 0; i < g.num_vertices(); ++i) g.vertex_ids.push_back(i);
  fill_edges(g);
  g.sides = side_structure(g.vertices);
  g.centroid = area_centroid(g.vertices);
  g.h = diameter(g.vertices);
  g.area = signed_area(g.vertices);
  g.vertex_h.assign(g.vertices.size(), g.h);
  g.cell_rule = polygon_rule(g.vertices, g.centroid, order);
  return g;
}

}  // namespace bkvem
