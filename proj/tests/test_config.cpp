#include <sstream>

#include <gtest/gtest.h>

#include "bkvem/config.hpp"

using namespace bkvem;

namespace {

RunConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in, "test");
}

std::string validation_error(const std::string& text) {
  try {
    parse(text).validate();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Config, Defaults) {
  const RunConfig c = parse("");
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(c.case_name, "ex1");
  EXPECT_EQ(c.k, 2);
  EXPECT_EQ(c.l, 1);
  EXPECT_EQ(c.mesh, MeshSource::Voronoi);
  EXPECT_EQ(c.threads, 1);
}

TEST(Config, ParsesKeysAndComments) {
  const RunConfig c = parse(
      "# comment\n"
      "case = ex2   # trailing\n"
      "family = nonconforming\n"
      "k = 3\n"
      "l = 2\n"
      "mesh = lshape\n"
      "mesh.cells = 2\n"
      "refinement = adaptive\n"
      "theta = 0.4\n"
      "solver = gmres\n"
      "gradient_degree = k-1\n"
      "mesh.files = a.json, b.json\n"
      "\n"
      "threads = 8\n");
  EXPECT_EQ(c.case_name, "ex2");
  EXPECT_EQ(c.family, Family::Nonconforming);
  EXPECT_EQ(c.k, 3);
  EXPECT_EQ(c.discretization(false).gradient_degree, 2);
  EXPECT_EQ(c.refinement, RefinementMode::Adaptive);
  EXPECT_DOUBLE_EQ(c.theta, 0.4);
  EXPECT_EQ(c.solver.method, SolverMethod::Gmres);
  EXPECT_EQ(c.mesh_files, (std::vector<std::string>{"a.json", "b.json"}));
  EXPECT_EQ(c.threads, 8);
  const DiscretizationOptions o = c.discretization(true);
  EXPECT_EQ(o.k, 3);
  EXPECT_EQ(o.threads, 8);
  EXPECT_TRUE(o.pressure_dirichlet_everywhere);
}

TEST(Config, SyntaxErrorsNameTheLine) {
  try {
    parse("k = 2\nnonsense\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("test:2"), std::string::npos);
  }
  EXPECT_THROW(parse("colour = red\n"), Error);
  EXPECT_THROW(parse("k = two\n"), Error);
  EXPECT_THROW(parse("mesh = hex\n"), Error);
  EXPECT_THROW(parse("allow_out_of_range_params = maybe\n"), Error);
}

TEST(Config, ValidationNamesTheField) {
  EXPECT_EQ(validation_error("k = 2\nl = 3\n").rfind("l:", 0), 0u);
  EXPECT_EQ(validation_error("family = nonconforming\nk = 4\nl = 1\n").rfind("l:", 0), 0u);
  EXPECT_EQ(validation_error("family = nonconforming\nk = 3\nl = 1\n"), "");
  EXPECT_EQ(validation_error("case = ex2\n").rfind("mesh:", 0), 0u);
  EXPECT_EQ(validation_error("mesh = lshape\n").rfind("mesh:", 0), 0u);
  EXPECT_EQ(validation_error("case = ex2\nmesh = lshape\n"), "");
  EXPECT_EQ(validation_error("alpha = 0\n").rfind("params:", 0), 0u);
  EXPECT_EQ(validation_error("alpha = 0\nallow_out_of_range_params = true\n"), "");
  EXPECT_EQ(validation_error("theta = 0\n").rfind("theta:", 0), 0u);
  EXPECT_EQ(validation_error("threads = 0\n").rfind("threads:", 0), 0u);
  EXPECT_EQ(validation_error("mesh = files\n").rfind("mesh.files:", 0), 0u);
  EXPECT_EQ(validation_error("mesh = files\nmesh.files = /nonexistent.json\n").rfind("mesh.files:", 0), 0u);
  EXPECT_NE(validation_error("lambda = 1\n").find("lambda, mu, c0"), std::string::npos);
  EXPECT_EQ(validation_error("case = ex7\n").rfind("case:", 0), 0u);
}

TEST(Config, PhysicalParameters) {
  const RunConfig c = parse("lambda = 1\nmu = 1\nc0 = 0\nalpha = 1\n");
  const ModelParams p = c.resolved_params();
  EXPECT_DOUBLE_EQ(p.gamma, 2.0);
  EXPECT_DOUBLE_EQ(p.beta, 2.0);
  EXPECT_DOUBLE_EQ(c.discretization(false).params.beta, 2.0);
}

TEST(Config, DumpParsesBack) {
  RunConfig c = parse(
      "case = polynomial\nfamily = nonconforming\nk = 4\nl = 3\nalpha = 0.1234567890123\n"
      "lambda = 3\nmu = 2\nc0 = 0.5\nmesh = structured\nmesh.perturb = 0.2\nlevels = 7\n"
      "solver = gmres\nsolver.tolerance = 1e-11\nquadrature.volume_order = 9\nsteps = 4\ninitial = exact\n"
      "out = results/x\nseed = 99\nthreads = 3\nmesh.files = m0.json,m1.json\n");
  const std::string once = dump_config(c);
  const RunConfig back = parse(once);
  EXPECT_EQ(dump_config(back), once);
  EXPECT_EQ(back.params.alpha, c.params.alpha);
  EXPECT_EQ(*back.c0, 0.5);
  EXPECT_EQ(back.initial, InitialState::Exact);
  EXPECT_EQ(back.mesh_files.size(), 2u);
}

TEST(Config, SymbolicGradientDegreeFollowsK) {
  const RunConfig c = parse("gradient_degree = k-1\nk = 4\nl = 3\n");
  EXPECT_EQ(c.discretization(false).gradient_degree, 3);
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(parse(dump_config(c)).discretization(false).gradient_degree, 3);
  EXPECT_EQ(parse("gradient_degree = 1\nk = 3\n").discretization(false).gradient_degree, 1);
}

TEST(Config, Overrides) {
  RunConfig c = parse("k = 2\n");
  set_config_value(c, "k", "3");
  set_config_value(c, "l", "2");
  EXPECT_EQ(c.k, 3);
  EXPECT_NO_THROW(c.validate());
  EXPECT_THROW(set_config_value(c, "bogus", "1"), Error);
  EXPECT_THROW(load_config("/nonexistent/config.cfg"), Error);
}
