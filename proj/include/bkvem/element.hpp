#pragma once

#include <vector>

#include "bkvem/mesh.hpp"
#include "bkvem/quadrature.hpp"

namespace bkvem {

// Local edge i runs from vertex i to vertex i+1 (counter-clockwise).
struct ElementEdge {
  int global = -1;
  int sign = 1;  // +1 if the global orientation matches the local one
  Point2 a{}, b{};
  double length = 0.0;
  Point2 t{}, n{};  // local tangent and outward normal
  BoundaryLabel label = BoundaryLabel::Interior;

  Point2 point(double xi) const { return a + (xi + 0.5) * (b - a); }
};

struct ElementGeometry {
  int cell = -1;
  std::vector<Point2> vertices;
  std::vector<int> vertex_ids;
  std::vector<double> vertex_h;
  std::vector<ElementEdge> edges;
  SideStructure sides;
  Point2 centroid{};
  double h = 0.0;
  double area = 0.0;
  QuadratureRule cell_rule;

  int num_vertices() const { return static_cast<int>(vertices.size()); }
};

ElementGeometry make_element(const PolygonalMesh& mesh, int cell, int quadrature_order);

// Stand-alone element from a CCW polygon, with unit vertex lengths replaced by
// the element diameter; used for single-element tests.
ElementGeometry make_element(std::span<const Point2> polygon, int quadrature_order);

}  // namespace bkvem
