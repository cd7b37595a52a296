#pragma once

#include <array>
#include <span>
#include <vector>

#include "bkvem/geometry.hpp"

namespace bkvem {

struct QuadratureRule {
  std::vector<Point2> points;
  std::vector<double> weights;

  std::size_t size() const { return points.size(); }
  void append(const QuadratureRule& other);
};

// Rule on the reference interval [-1/2, 1/2]; weights sum to 1.
struct LineRule {
  std::vector<double> xi;
  std::vector<double> weights;
};

// n-point Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

LineRule line_rule(int order);
QuadratureRule edge_rule(Point2 a, Point2 b, int order);
QuadratureRule triangle_rule(Point2 a, Point2 b, Point2 c, int order);

// Fan triangulation from `center` when every fan triangle is positive, ear
// clipping otherwise. Each triangle is split into 4^subdivisions pieces.
QuadratureRule polygon_rule(std::span<const Point2> vertices, Point2 center, int order,
                            int subdivisions = 0);

// Triangulation of a simple CCW polygon, as vertex index triples.
std::vector<std::array<int, 3>> ear_clip(std::span<const Point2> vertices);

}  // namespace bkvem
