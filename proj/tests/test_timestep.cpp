#include <gtest/gtest.h>

#include "bkvem/manufactured.hpp"
#include "bkvem/timestep.hpp"

using namespace bkvem;

namespace {

DiscretizationOptions options(Family f, int k, int l, ModelParams p) {
  DiscretizationOptions o;
  o.family = f;
  o.k = k;
  o.l = l;
  o.params = p;
  o.allow_out_of_range_params = true;
  return o;
}

Solution zeros(const Discretization& d) {
  return {Eigen::VectorXd::Zero(d.deflection_map().total), Eigen::VectorXd::Zero(d.pressure_map().total)};
}

const PolygonalMesh& mesh() {
  static const PolygonalMesh m = [] {
    VoronoiOptions vo;
    vo.seed = 12;
    return generate_voronoi(20, {}, vo, example1_labeler());
  }();
  return m;
}

}  // namespace

TEST(Timestep, ZeroDataStaysZero) {
  const Discretization d(mesh(), options(Family::Nonconforming, 2, 1, {}));
  int calls = 0;
  const auto out = timestep_driver(
      d, [](int) { return ProblemData{[](Point2) { return 0.0; }, [](Point2) { return 0.0; }, nullptr}; }, zeros(d),
      zeros(d), 3, [&](int, const Solution&) { ++calls; });
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(calls, 3);
  for (const auto& s : out) {
    EXPECT_EQ(s.u.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(s.p.cwiseAbs().maxCoeff(), 0.0);
  }
}

// One step from zero states is the static problem with the same data.
TEST(Timestep, FirstStepFromRestIsStatic) {
  const ModelParams prm{0.5, 2.0, 3.0};
  const ManufacturedCase c = builtin_case("ex1", prm);
  for (auto fam : {Family::Conforming, Family::Nonconforming}) {
    const Discretization d(mesh(), options(fam, 2, 1, prm));
    const ProblemData data = problem_data(c);
    const GlobalSystem a = d.build_system(data);
    const GlobalSystem b = d.build_system(data, history_locals(d, data, zeros(d), zeros(d)));
    ASSERT_EQ(a.rhs.size(), b.rhs.size());
    EXPECT_EQ((a.rhs - b.rhs).cwiseAbs().maxCoeff(), 0.0);
    const Solution st = d.solve(data);
    const auto out = timestep_driver(d, [&](int) { return data; }, zeros(d), zeros(d), 1);
    EXPECT_EQ((out[0].u - st.u).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ((out[0].p - st.p).cwiseAbs().maxCoeff(), 0.0);
  }
}

// With f = f~ - u, g = g~ - p and the interpolant as initial state the
// polynomial solution is a fixed point of the scheme.
TEST(Timestep, SteadyPolynomialFixedPoint) {
  const ModelParams prm{0.0, 2.0, 1.5};
  for (auto fam : {Family::Conforming, Family::Nonconforming})
    for (int k = 2; k <= 3; ++k) {
      const ManufacturedCase c = builtin_case("polynomial", prm, k, k - 1, 21);
      const Discretization d(mesh(), options(fam, k, k - 1, prm));
      ProblemData data = problem_data(c);
      data.f = [&](Point2 x) { return c.f_tilde(x) - c.exact.u(x); };
      data.g = [&](Point2 x) { return c.g_tilde(x) - c.exact.p(x); };
      const Solution in = d.interpolate(c.exact);
      const auto out = timestep_driver(d, [&](int) { return data; }, in, in, 3);
      for (const auto& s : out) {
        EXPECT_LE((s.u - in.u).cwiseAbs().maxCoeff(), 1e-9 * in.u.cwiseAbs().maxCoeff());
        EXPECT_LE((s.p - in.p).cwiseAbs().maxCoeff(), 1e-9 * in.p.cwiseAbs().maxCoeff());
      }
    }
}

// A nonzero initial deflection with zero data decays.
TEST(Timestep, FreeDecay) {
  const ManufacturedCase c = builtin_case("ex1", {});
  const Discretization d(mesh(), options(Family::Conforming, 2, 1, {}));
  const Solution in = d.interpolate(c.exact);
  const auto out = timestep_driver(
      d, [](int) { return ProblemData{[](Point2) { return 0.0; }, [](Point2) { return 0.0; }, nullptr}; }, in, in, 4);
  double prev = in.u.norm();
  for (const auto& s : out) {
    EXPECT_LT(s.u.norm(), prev);
    prev = s.u.norm();
  }
}

TEST(Timestep, RejectsBadInput) {
  const Discretization d(mesh(), options(Family::Conforming, 2, 1, {}));
  const StepData data = [](int) { return ProblemData{}; };
  EXPECT_THROW(timestep_driver(d, data, zeros(d), zeros(d), -1), Error);
  Solution bad = zeros(d);
  bad.u.resize(3);
  EXPECT_THROW(timestep_driver(d, data, bad, zeros(d), 1), Error);
  Solution prev = zeros(d);
  prev.p.resize(0);
  EXPECT_NO_THROW(timestep_driver(d, data, zeros(d), prev, 1));
}
