#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "bkvem/discretization.hpp"
#include "bkvem/manufactured.hpp"
#include "support.hpp"

using namespace bkvem;
using testing_support::oracle_element;

namespace {

const std::vector<Point2> kSquare{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
const std::vector<Point2> kPentagon{{0, 0}, {0.5, 0}, {1, 0}, {1.2, 0.8}, {0.3, 1.1}};

Eigen::VectorXd random_vector(int n, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = u(rng);
  return v;
}

DiscretizationOptions options(Family f, int k, int l, ModelParams p = {}) {
  DiscretizationOptions o;
  o.family = f;
  o.k = k;
  o.l = l;
  o.params = p;
  o.allow_out_of_range_params = true;
  return o;
}

bool symmetric(const Eigen::MatrixXd& m, double tol) {
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= tol * std::max(1.0, m.cwiseAbs().maxCoeff());
}

}  // namespace

TEST(Params, DeriveExamples) {
  const ModelParams a = derive_params(1, 1, 0, 1);
  EXPECT_DOUBLE_EQ(a.gamma, 2.0);
  EXPECT_DOUBLE_EQ(a.beta, 2.0);
  const ModelParams b = derive_params(1e6, 1, 1, 1);
  EXPECT_NEAR(b.gamma, 1e6 + 1, 1e-6);
  EXPECT_NEAR(b.beta, (1e6 + 3) * b.gamma, 1e-3);
  const ModelParams c = derive_params(0, 1, 0, 1);
  EXPECT_DOUBLE_EQ(c.gamma, 1.0);
  EXPECT_DOUBLE_EQ(c.beta, 1.0);
  EXPECT_THROW(derive_params(1, 0, 0, 1), Error);
  EXPECT_THROW(derive_params(1, -1, 0, 1), Error);
}

TEST(Params, Validation) {
  EXPECT_NO_THROW((ModelParams{1e-6, 1e6, 1e6}.validate()));
  EXPECT_THROW((ModelParams{0.0, 1, 1}.validate()), Error);
  EXPECT_THROW((ModelParams{2.0, 1, 1}.validate()), Error);
  EXPECT_THROW((ModelParams{0.5, 0.5, 1}.validate()), Error);
  EXPECT_THROW((ModelParams{0.5, 1, 0.5}.validate()), Error);
  EXPECT_NO_THROW((ModelParams{0.0, 0.5, 1}.validate(true)));
}

TEST(LocalForms, ZeroAlphaDecouples) {
  const ElementGeometry g = make_element(kPentagon, 8);
  const auto pu = compute_deflection_projectors(g, SpaceKind::deflection(Family::Conforming, 2));
  const auto pp = compute_pressure_projectors(g, SpaceKind::pressure(Family::Conforming, 1));
  EXPECT_EQ(local_forms(g, pu, pp, {0.0, 1, 1}).b.cwiseAbs().maxCoeff(), 0.0);
}

TEST(LocalForms, ConstantOnUnitSquare) {
  const ElementGeometry g = make_element(kSquare, 8);
  const auto pu = compute_deflection_projectors(g, SpaceKind::deflection(Family::Conforming, 2));
  const auto pp = compute_pressure_projectors(g, SpaceKind::pressure(Family::Conforming, 1));
  const auto loc = local_forms(g, pu, pp, {});
  const Eigen::VectorXd one = oracle::dofs(oracle_element(g), pu.space,
                                           {[](Point2) { return 1.0; }, [](Point2) { return Point2{}; }});
  EXPECT_NEAR(one.dot(loc.a1 * one), 1.0, 1e-13);
}

// Each term of a1 separately: symmetric, semidefinite, summing to a1, and
// positive on random vectors.
TEST(LocalForms, DeflectionTermsOnPentagon) {
  std::mt19937 rng(51);
  const ElementGeometry g = make_element(kPentagon, 8);
  for (auto fam : {Family::Conforming, Family::Nonconforming})
    for (int k = 2; k <= 3; ++k) {
      const auto pu = compute_deflection_projectors(g, SpaceKind::deflection(fam, k));
      const auto pp = compute_pressure_projectors(g, SpaceKind::pressure(fam, k - 1));
      const auto t = deflection_form_terms(g, pu);
      const auto loc = local_forms(g, pu, pp, {});
      EXPECT_LE((t.l2 + t.l2_stab + t.hessian + t.hessian_stab - loc.a1).cwiseAbs().maxCoeff(), 1e-12);
      for (const Eigen::MatrixXd* m : {&t.l2, &t.l2_stab, &t.hessian, &t.hessian_stab}) {
        EXPECT_TRUE(symmetric(*m, 1e-12));
        EXPECT_GE(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(*m).eigenvalues().minCoeff(), -1e-10);
      }
      EXPECT_GT(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(loc.a1).eigenvalues().minCoeff(), 1e-8);
      EXPECT_GT(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(loc.a3).eigenvalues().minCoeff(), 1e-8);
      for (int trial = 0; trial < 5; ++trial) {
        const Eigen::VectorXd v = random_vector(pu.ndof, rng);
        const Eigen::VectorXd c = pu.l2 * v;
        EXPECT_GE(v.dot(loc.a1 * v), c.dot(mass_matrix(g, k, k) * c) - 1e-12);
      }
      // the stabilization sees everything outside the range of pd
      const Eigen::VectorXd v = random_vector(pu.ndof, rng);
      const Eigen::VectorXd kern = v - pu.dof_matrix * (pu.energy * v);
      EXPECT_GT(kern.dot(t.hessian_stab * kern), 1e-6 * kern.squaredNorm());
    }
}

TEST(LocalForms, DofiDofi) {
  const Eigen::MatrixXd d = (Eigen::MatrixXd(3, 1) << 1, 0, 0).finished();
  const Eigen::MatrixXd p = (Eigen::MatrixXd(1, 3) << 1, 0, 0).finished();
  const Eigen::MatrixXd s = dofi_dofi(d, p, 2.0);
  // I - D P zeroes the first row and column
  Eigen::MatrixXd expect = Eigen::MatrixXd::Zero(3, 3);
  expect(1, 1) = expect(2, 2) = 2.0;
  EXPECT_LE((s - expect).cwiseAbs().maxCoeff(), 0.0);
}

TEST(LocalRhs, ZeroAndPolynomialLoads) {
  const ElementGeometry g = make_element(kPentagon, 10);
  for (auto fam : {Family::Conforming, Family::Nonconforming}) {
    const auto pu = compute_deflection_projectors(g, SpaceKind::deflection(fam, 3));
    EXPECT_EQ(local_rhs(g, pu.basis, pu.l2, [](Point2) { return 0.0; }, 10).cwiseAbs().maxCoeff(), 0.0);
    auto f = [](Point2 x) { return 1.0 + x.x * x.y - 2 * x.y * x.y * x.y; };
    auto q = [](Point2 x) { return x.x * x.x - 0.5 * x.y + 3 * x.x * x.y * x.y; };
    auto gq = [](Point2 x) { return Point2{2 * x.x + 3 * x.y * x.y, -0.5 + 6 * x.x * x.y}; };
    const Eigen::VectorXd load = local_rhs(g, pu.basis, pu.l2, f, 10);
    const Eigen::VectorXd v = oracle::dofs(oracle_element(g), pu.space, {q, gq});
    const QuadratureRule r = polygon_rule(g.vertices, g.centroid, 10);
    double exact = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) exact += r.weights[i] * f(r.points[i]) * q(r.points[i]);
    EXPECT_NEAR(load.dot(v), exact, 1e-12);
  }
}

TEST(Assemble, SingleClampedElementIsEmpty) {
  const PolygonalMesh m = generate_structured(1, 1, {}, 0.0, 1, uniform_labeler(BoundaryLabel::Clamped));
  DiscretizationOptions o = options(Family::Conforming, 2, 1);
  o.pressure_dirichlet_everywhere = true;
  const Discretization d(m, o);
  ProblemData data{[](Point2) { return 0.0; }, [](Point2) { return 0.0; }, nullptr};
  const GlobalSystem s = d.build_system(data);
  EXPECT_EQ(s.matrix.rows(), 0);
  const Eigen::VectorXd x = solve(s);
  EXPECT_EQ(x.size(), d.num_dofs());
  EXPECT_EQ(x.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Assemble, DimensionMatchesFreeCount) {
  const PolygonalMesh m = generate_structured(2, 2, {}, 0.0, 1, example1_labeler());
  for (auto fam : {Family::Conforming, Family::Nonconforming}) {
    const Discretization d(m, options(fam, 2, 1));
    ProblemData data{[](Point2) { return 1.0; }, [](Point2) { return 0.0; }, nullptr};
    const auto [um, pm] = d.constrained_maps(data);
    const GlobalSystem s = d.build_system(data);
    EXPECT_EQ(s.matrix.rows(), um.num_free() + pm.num_free());
    EXPECT_EQ(s.n_u, um.total);
    EXPECT_EQ(s.n_p, pm.total);
  }
}

// Block structure of the full matrix, skew cancellation, coercivity, and
// independence of the accumulation order.
TEST(Assemble, StructureProperties) {
  std::mt19937 rng(53);
  VoronoiOptions vo;
  vo.seed = 5;
  const PolygonalMesh m = refine(generate_voronoi(12, {}, vo, example1_labeler()), {0, 4});
  for (auto fam : {Family::Conforming, Family::Nonconforming})
    for (int k = 2; k <= 3; ++k) {
      const Discretization d(m, options(fam, k, k - 1, {0.4, 3.0, 2.0}));
      const Eigen::MatrixXd full = Eigen::MatrixXd(assemble_full(d.deflection_map(), d.pressure_map(), d.local_matrices()));
      const int nu = d.deflection_map().total, np = d.pressure_map().total;
      const Eigen::MatrixXd a1 = full.topLeftCorner(nu, nu), a3 = full.bottomRightCorner(np, np);
      EXPECT_TRUE(symmetric(a1, 1e-12));
      EXPECT_TRUE(symmetric(a3, 1e-12));
      EXPECT_LE((full.topRightCorner(nu, np) + full.bottomLeftCorner(np, nu).transpose()).cwiseAbs().maxCoeff(), 1e-12);

      // reverse-order dense accumulation
      Eigen::MatrixXd ref = Eigen::MatrixXd::Zero(nu + np, nu + np);
      for (int c = m.num_cells() - 1; c >= 0; --c) {
        const auto& ud = d.deflection_map().cell_dofs[c];
        const auto& pd = d.pressure_map().cell_dofs[c];
        const LocalMatrices& l = d.local_matrices()[c];
        for (std::size_t i = 0; i < ud.size(); ++i) {
          for (std::size_t j = 0; j < ud.size(); ++j) ref(ud[i], ud[j]) += l.a1(i, j);
          for (std::size_t j = 0; j < pd.size(); ++j) {
            ref(ud[i], nu + pd[j]) -= l.b(i, j);
            ref(nu + pd[j], ud[i]) += l.b(i, j);
          }
        }
        for (std::size_t i = 0; i < pd.size(); ++i)
          for (std::size_t j = 0; j < pd.size(); ++j) ref(nu + pd[i], nu + pd[j]) += l.a3(i, j);
      }
      EXPECT_LE((full - ref).cwiseAbs().maxCoeff(), 1e-13 * full.cwiseAbs().maxCoeff());

      ProblemData data{[](Point2) { return 0.0; }, [](Point2) { return 0.0; }, nullptr};
      const GlobalSystem s = d.build_system(data);
      const Eigen::MatrixXd mf(s.matrix);
      for (int trial = 0; trial < 20; ++trial) {
        const Eigen::VectorXd v = random_vector(static_cast<int>(mf.rows()), rng);
        Eigen::VectorXd x = Eigen::VectorXd::Zero(nu + np);
        for (int i = 0; i < v.size(); ++i) x[s.free_to_global[i]] = v[i];
        const double quad = v.dot(mf * v);
        const double parts = x.head(nu).dot(a1 * x.head(nu)) + x.tail(np).dot(a3 * x.tail(np));
        EXPECT_GT(quad, 0.0);
        EXPECT_NEAR(quad, parts, 1e-10 * parts);
      }
    }
}

TEST(Solve, OneByOne) {
  GlobalSystem s;
  s.matrix.resize(1, 1);
  s.matrix.insert(0, 0) = 4.0;
  s.matrix.makeCompressed();
  s.rhs = Eigen::VectorXd::Constant(1, 2.0);
  s.free_to_global = {0};
  s.global_to_free = {0};
  s.prescribed = Eigen::VectorXd::Zero(1);
  s.n_u = 1;
  EXPECT_DOUBLE_EQ(solve(s)[0], 0.5);
  SolverOptions g;
  g.method = SolverMethod::Gmres;
  EXPECT_NEAR(solve(s, g)[0], 0.5, 1e-14);
}

// The interpolant of a polynomial solution solves the patch system. With
// alpha = 0 this holds for u in P_k, p in P_l.
TEST(Solve, InterpolantResidual) {
  const PolygonalMesh m = generate_structured(3, 3, {}, 0.2, 3, example1_labeler());
  for (auto fam : {Family::Conforming, Family::Nonconforming}) {
    const ModelParams prm{0.0, 2.0, 3.0};
    const ManufacturedCase cs = builtin_case("polynomial", prm, 2, 1, 11);
    const Discretization d(m, options(fam, 2, 1, prm));
    const ProblemData data = problem_data(cs);
    const GlobalSystem s = d.build_system(data);
    const Solution in = d.interpolate(cs.exact);
    Eigen::VectorXd stacked(d.num_dofs());
    stacked << in.u, in.p;
    Eigen::VectorXd free(s.matrix.rows());
    for (int i = 0; i < free.size(); ++i) free[i] = stacked[s.free_to_global[i]];
    EXPECT_LE((s.matrix * free - s.rhs).norm(), 1e-9 * s.rhs.norm());
  }
}

TEST(Solve, ExtremeParametersAndGmres) {
  const PolygonalMesh m = generate_structured(4, 4, {}, 0.1, 2, example1_labeler());
  const ModelParams prm{1e-6, 1e6, 1e6};
  const ManufacturedCase cs = builtin_case("ex1", prm);
  DiscretizationOptions o = options(Family::Nonconforming, 2, 1, prm);
  const Discretization d(m, o);
  const GlobalSystem s = d.build_system(problem_data(cs));
  SolveReport rep;
  const Eigen::VectorXd x = solve(s, {}, &rep);
  EXPECT_LE(rep.relative_residual, 1e-10);
  SolverOptions g;
  g.method = SolverMethod::Gmres;
  g.tolerance = 1e-12;
  SolveReport grep;
  const Eigen::VectorXd y = solve(s, g, &grep);
  EXPECT_LE(grep.relative_residual, 1e-10);
  EXPECT_LE((x - y).cwiseAbs().maxCoeff(), 1e-6 * x.cwiseAbs().maxCoeff());
}

TEST(Solve, SolverNames) {
  EXPECT_EQ(parse_solver("direct-lu"), SolverMethod::DirectLU);
  EXPECT_EQ(parse_solver(to_string(SolverMethod::Gmres)), SolverMethod::Gmres);
  EXPECT_THROW(parse_solver("cg"), Error);
}

TEST(Export, MatrixMarket) {
  const PolygonalMesh m = generate_structured(2, 2, {}, 0.0, 1, example1_labeler());
  const Discretization d(m, options(Family::Conforming, 2, 1));
  const auto full = assemble_full(d.deflection_map(), d.pressure_map(), d.local_matrices());
  const auto path = (std::filesystem::temp_directory_path() / "bkvem_test_matrix.mtx").string();
  write_matrix_market(full, path);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header.rfind("%%MatrixMarket matrix coordinate real general", 0), 0u);
  int rows = 0, cols = 0, nnz = 0;
  in >> rows >> cols >> nnz;
  EXPECT_EQ(rows, d.num_dofs());
  EXPECT_EQ(nnz, full.nonZeros());
}
