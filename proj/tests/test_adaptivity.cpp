#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "bkvem/adaptivity.hpp"
#include "bkvem/manufactured.hpp"

using namespace bkvem;

namespace {

DiscretizationOptions options(Family f, int k, int l, bool pd) {
  DiscretizationOptions o;
  o.family = f;
  o.k = k;
  o.l = l;
  o.pressure_dirichlet_everywhere = pd;
  return o;
}

double fraction_near_origin(const PolygonalMesh& m, double r) {
  int n = 0;
  for (int c = 0; c < m.num_cells(); ++c) {
    const Point2 x = m.cell(c).centroid;
    if (std::hypot(x.x, x.y) < r) ++n;
  }
  return static_cast<double>(n) / m.num_cells();
}

}  // namespace

TEST(Dorfler, Examples) {
  EXPECT_EQ(dorfler_mark(std::vector<double>{4, 3, 2, 1}, 0.5), (std::vector<int>{0, 1}));
  EXPECT_EQ(dorfler_mark(std::vector<double>{1, 2, 3, 4}, 0.5), (std::vector<int>{3, 2}));
  EXPECT_EQ(dorfler_mark(std::vector<double>{4, 3, 2, 1}, 1.0).size(), 4u);
  for (int n = 1; n <= 9; ++n) EXPECT_EQ(dorfler_mark(std::vector<double>(n, 1.0), 0.5).size(), (n + 1) / 2u);
  // ties resolve by id
  EXPECT_EQ(dorfler_mark(std::vector<double>{1, 5, 5, 1}, 0.4), (std::vector<int>{1}));
  EXPECT_EQ(dorfler_mark(std::vector<double>{1, 5, 5, 1}, 0.6), (std::vector<int>{1, 2}));
  EXPECT_THROW(dorfler_mark(std::vector<double>{}, 0.5), Error);
  EXPECT_THROW(dorfler_mark(std::vector<double>{1}, 0.0), Error);
  EXPECT_THROW(dorfler_mark(std::vector<double>{1}, 1.5), Error);
}

// The marked set is the shortest prefix reaching theta of the total.
TEST(Dorfler, MinimalPrefixProperty) {
  std::mt19937 rng(17);
  std::exponential_distribution<double> ex(1.0);
  std::uniform_real_distribution<double> th(0.05, 0.99);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> e(1 + rng() % 40);
    for (auto& v : e) v = ex(rng);
    const double theta = th(rng);
    const auto m = dorfler_mark(e, theta);
    double total = 0, acc = 0;
    for (double v : e) total += v;
    for (int i : m) acc += e[i];
    EXPECT_GE(acc, theta * total * (1 - 1e-14));
    EXPECT_LT(acc - e[m.back()], theta * total);
    for (std::size_t i = 1; i < m.size(); ++i) EXPECT_GE(e[m[i - 1]], e[m[i]]);
    for (std::size_t i = 0; i < e.size(); ++i)
      if (std::find(m.begin(), m.end(), static_cast<int>(i)) == m.end()) EXPECT_LE(e[i], e[m.back()]);
  }
}

TEST(MarkingConfig, Validation) {
  MarkingConfig m;
  EXPECT_NO_THROW(m.validate());
  m.theta = 0.0;
  EXPECT_THROW(m.validate(), Error);
  m = {};
  m.max_levels = 0;
  EXPECT_THROW(m.validate(), Error);
}

TEST(Adaptive, LoopInvariantsAndDeterminism) {
  const ManufacturedCase c = builtin_case("ex2", {});
  const PolygonalMesh start = generate_lshape(2, 0.0, 1, c.labeler);
  MarkingConfig mk;
  mk.max_levels = 4;
  int calls = 0;
  const AdaptiveTrace a = adaptive_loop(start, options(Family::Nonconforming, 2, 1, true), c, mk,
                                        [&](const PolygonalMesh& m, const Discretization& d, const AdaptiveLevel& l) {
                                          ++calls;
                                          EXPECT_EQ(m.num_cells(), l.cells);
                                          EXPECT_EQ(d.num_dofs(), l.ndof);
                                          EXPECT_EQ(static_cast<int>(l.estimator.cells.size()), l.cells);
                                        });
  const AdaptiveTrace b = adaptive_loop(start, options(Family::Nonconforming, 2, 1, true), c, mk);
  EXPECT_TRUE(a.failure.empty());
  ASSERT_EQ(a.levels.size(), 4u);
  EXPECT_EQ(calls, 4);
  for (std::size_t i = 0; i < a.levels.size(); ++i) {
    EXPECT_EQ(a.levels[i].level, static_cast<int>(i));
    if (i > 0) {
      EXPECT_GE(a.levels[i].ndof, a.levels[i - 1].ndof);
      // an N-gon becomes N cells, N >= 4
      EXPECT_GE(a.levels[i].cells, a.levels[i - 1].cells + 3 * a.levels[i - 1].marked);
    }
    EXPECT_TRUE(a.levels[i].estimator.cells.empty());
    EXPECT_EQ(a.levels[i].estimator.eta, b.levels[i].estimator.eta);
    EXPECT_EQ(a.levels[i].errors.energy, b.levels[i].errors.energy);
  }
  EXPECT_EQ(a.levels.back().marked, 0);
  std::ostringstream s1, s2;
  write_trace_csv(a, s1);
  write_trace_csv(b, s2);
  EXPECT_EQ(s1.str(), s2.str());
  EXPECT_EQ(s1.str().rfind("level,cells,ndof", 0), 0u);
}

TEST(Adaptive, FullMarkingIsUniformRefinement) {
  const ManufacturedCase c = builtin_case("ex1", {});
  const PolygonalMesh start = generate_structured(2, 2, {}, 0.0, 1, c.labeler);
  MarkingConfig mk;
  mk.theta = 1.0;
  mk.max_levels = 3;
  std::vector<PolygonalMesh> seen;
  adaptive_loop(start, options(Family::Conforming, 2, 1, false), c, mk,
                [&](const PolygonalMesh& m, const Discretization&, const AdaptiveLevel&) { seen.push_back(m); });
  ASSERT_EQ(seen.size(), 3u);
  const PolygonalMesh u2 = generate_structured(8, 8, {}, 0.0, 1, c.labeler);
  EXPECT_EQ(seen[2].num_cells(), u2.num_cells());
  EXPECT_NEAR(seen[2].h(), u2.h(), 1e-14);
  double area = 0;
  for (int i = 0; i < seen[2].num_cells(); ++i) area = std::max(area, seen[2].cell(i).area);
  EXPECT_NEAR(area, 1.0 / 64, 1e-14);
}

TEST(Adaptive, StopsOnToleranceAndSize) {
  const ManufacturedCase c = builtin_case("ex1", {});
  const PolygonalMesh start = generate_structured(2, 2, {}, 0.0, 1, c.labeler);
  MarkingConfig mk;
  mk.max_levels = 5;
  mk.tolerance = 1e30;
  EXPECT_EQ(adaptive_loop(start, options(Family::Conforming, 2, 1, false), c, mk).levels.size(), 1u);
  mk.tolerance = 0.0;
  mk.max_ndof = 1;
  EXPECT_TRUE(adaptive_loop(start, options(Family::Conforming, 2, 1, false), c, mk).levels.empty());
}

TEST(Adaptive, RefinesTowardSingularCorner) {
  const ManufacturedCase c = builtin_case("ex2", {});
  const PolygonalMesh start = generate_lshape(2, 0.0, 1, c.labeler);
  MarkingConfig mk;
  mk.max_levels = 6;
  PolygonalMesh last;
  const AdaptiveTrace t = adaptive_loop(start, options(Family::Nonconforming, 2, 1, true), c, mk,
                                        [&](const PolygonalMesh& m, const Discretization&, const AdaptiveLevel&) {
                                          last = m;
                                        });
  ASSERT_EQ(t.levels.size(), 6u);
  EXPECT_GT(fraction_near_origin(last, 0.25), fraction_near_origin(generate_lshape(16, 0.0, 1, c.labeler), 0.25));
  EXPECT_LT(t.levels.back().errors.energy, t.levels.front().errors.energy);
}
