#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "bkvem/geometry.hpp"
#include "bkvem/mesh.hpp"
#include "bkvem/quadrature.hpp"

using namespace bkvem;

namespace {

double integrate(const QuadratureRule& r, const std::function<double(Point2)>& f) {
  double s = 0.0;
  for (std::size_t q = 0; q < r.size(); ++q) s += r.weights[q] * f(r.points[q]);
  return s;
}

double sum_weights(const QuadratureRule& r) {
  double s = 0.0;
  for (double w : r.weights) s += w;
  return s;
}

// Exact int_K x^a y^b by the divergence theorem with a 64-point edge rule.
double green_moment(const std::vector<Point2>& poly, int a, int b) {
  std::vector<double> t, w;
  gauss_legendre(64, t, w);
  double s = 0.0;
  const int n = static_cast<int>(poly.size());
  for (int i = 0; i < n; ++i) {
    const Point2 p = poly[i], q = poly[(i + 1) % n];
    const double nx = q.y - p.y;  // outward normal times length
    for (std::size_t j = 0; j < t.size(); ++j) {
      const Point2 x = p + (0.5 * (t[j] + 1.0)) * (q - p);
      s += 0.5 * w[j] * nx * std::pow(x.x, a + 1) / (a + 1) * std::pow(x.y, b);
    }
  }
  return s;
}

const std::vector<Point2> kSquare{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
// pentagon with V2 on the straight side V1-V3
const std::vector<Point2> kPentagon{{0, 0}, {0.5, 0}, {1, 0}, {1.2, 0.8}, {0.3, 1.1}};

}  // namespace

TEST(GaussLegendre, WeightsAndSymmetry) {
  for (int n = 1; n <= 20; ++n) {
    std::vector<double> t, w;
    gauss_legendre(n, t, w);
    ASSERT_EQ(static_cast<int>(t.size()), n);
    double s = 0.0;
    for (double x : w) s += x;
    EXPECT_NEAR(s, 2.0, 1e-14);
    for (int i = 0; i < n; ++i) EXPECT_NEAR(t[i], -t[n - 1 - i], 1e-14);
  }
}

TEST(LineRule, ExactOnUnitSegment) {
  const QuadratureRule r = edge_rule({0, 0}, {1, 0}, 3);
  EXPECT_NEAR(integrate(r, [](Point2 x) { return x.x * x.x; }), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(integrate(r, [](Point2 x) { return x.x * x.x * x.x; }), 0.25, 1e-15);
  EXPECT_NEAR(sum_weights(r), 1.0, 1e-15);
}

TEST(LineRule, PointCountAndReference) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-2, 2);
  std::vector<double> t, w;
  gauss_legendre(64, t, w);
  for (int order = 1; order <= 15; ++order) {
    const LineRule lr = line_rule(order);
    EXPECT_EQ(static_cast<int>(lr.xi.size()), (order + 2) / 2);
    const Point2 a{u(rng), u(rng)}, b{u(rng), u(rng)};
    const QuadratureRule r = edge_rule(a, b, order);
    for (int j = 0; j <= order; ++j) {
      auto f = [&](Point2 x) { return std::pow(x.x + 0.3 * x.y, j); };
      double ref = 0.0;
      for (std::size_t q = 0; q < t.size(); ++q) ref += 0.5 * w[q] * distance(a, b) * f(a + (0.5 * (t[q] + 1)) * (b - a));
      EXPECT_NEAR(integrate(r, f), ref, 1e-12 * std::max(1.0, std::abs(ref)));
    }
  }
}

TEST(PolygonRule, UnitSquareClosedForms) {
  const QuadratureRule r = polygon_rule(kSquare, {0.5, 0.5}, 2);
  EXPECT_NEAR(integrate(r, [](Point2) { return 1.0; }), 1.0, 1e-14);
  EXPECT_NEAR(integrate(r, [](Point2 x) { return x.x; }), 0.5, 1e-14);
  EXPECT_NEAR(integrate(r, [](Point2 x) { return x.x * x.y; }), 0.25, 1e-14);
}

TEST(PolygonRule, RegularHexagonArea) {
  std::vector<Point2> hex;
  for (int i = 0; i < 6; ++i) hex.push_back({std::cos(i * std::numbers::pi / 3), std::sin(i * std::numbers::pi / 3)});
  const QuadratureRule r = polygon_rule(hex, {0, 0}, 4);
  EXPECT_NEAR(sum_weights(r), 1.5 * std::sqrt(3.0), 1e-13);
}

TEST(PolygonRule, PentagonMomentsMatchGreen) {
  const Point2 c = area_centroid(kPentagon);
  const double h = diameter(kPentagon);
  const QuadratureRule r = polygon_rule(kPentagon, c, 8);
  // scaled monomials of degree <= 4 expand into raw moments; compare raw ones
  for (int a = 0; a <= 4; ++a)
    for (int b = 0; a + b <= 4; ++b) {
      const double q = integrate(r, [&](Point2 x) { return std::pow(x.x, a) * std::pow(x.y, b); });
      EXPECT_NEAR(q, green_moment(kPentagon, a, b), 1e-12);
    }
  (void)h;
}

TEST(PolygonRule, NonStarShapedFallsBackToEars) {
  // a comb: the fan from the centroid is not positive
  const std::vector<Point2> comb{{0, 0}, {3, 0}, {3, 1}, {2.5, 1}, {2.5, 0.2}, {2, 0.2}, {2, 1}, {1, 1},
                                 {1, 0.2}, {0.5, 0.2}, {0.5, 1}, {0, 1}};
  const QuadratureRule r = polygon_rule(comb, area_centroid(comb), 6);
  EXPECT_NEAR(sum_weights(r), signed_area(comb), 1e-13);
  for (std::size_t q = 0; q < r.size(); ++q) EXPECT_TRUE(point_in_polygon(comb, r.points[q]));
  for (int a = 0; a <= 3; ++a)
    for (int b = 0; a + b <= 3; ++b)
      EXPECT_NEAR(integrate(r, [&](Point2 x) { return std::pow(x.x, a) * std::pow(x.y, b); }),
                  green_moment(comb, a, b), 1e-12);
  EXPECT_EQ(ear_clip(comb).size(), comb.size() - 2);
}

TEST(PolygonRule, SubdividedRuleStaysExact) {
  const QuadratureRule r = polygon_rule(kPentagon, area_centroid(kPentagon), 6, 2);
  EXPECT_NEAR(integrate(r, [](Point2 x) { return x.x * x.x * x.y * x.y * x.y; }), green_moment(kPentagon, 2, 3), 1e-13);
}

// Property: on random Voronoi cells, weights sum to |K|, points lie in the
// closure of K, and products m*m of degree-d monomials integrate exactly.
TEST(PolygonRule, RandomVoronoiCellsProperty) {
  for (unsigned seed = 1; seed <= 5; ++seed) {
    VoronoiOptions vo;
    vo.seed = seed;
    vo.lloyd_iters = 5;
    const PolygonalMesh m = generate_voronoi(20, {}, vo, uniform_labeler(BoundaryLabel::Clamped));
    for (int c = 0; c < m.num_cells(); ++c) {
      const auto poly = m.cell_points(c);
      const int d = 3;
      const QuadratureRule r = polygon_rule(poly, m.cell(c).centroid, 2 * d);
      EXPECT_NEAR(sum_weights(r), m.cell(c).area, 1e-14);
      for (std::size_t q = 0; q < r.size(); ++q) {
        bool inside = point_in_polygon(poly, r.points[q]);
        EXPECT_TRUE(inside);
      }
      for (int a = 0; a <= 2 * d; ++a)
        for (int b = 0; a + b <= 2 * d; ++b)
          EXPECT_NEAR(integrate(r, [&](Point2 x) { return std::pow(x.x, a) * std::pow(x.y, b); }),
                      green_moment(poly, a, b), 1e-13);
    }
  }
}

TEST(TriangleRule, ExactToOrder) {
  const Point2 a{0.1, 0.2}, b{1.3, 0.1}, c{0.4, 0.9};
  const std::vector<Point2> tri{a, b, c};
  for (int order = 1; order <= 12; ++order) {
    const QuadratureRule r = triangle_rule(a, b, c, order);
    for (int p = 0; p <= order; ++p)
      EXPECT_NEAR(integrate(r, [&](Point2 x) { return std::pow(x.x, order - p) * std::pow(x.y, p); }),
                  green_moment(tri, order - p, p), 1e-13);
  }
}
