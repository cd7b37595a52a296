#pragma once

// Helpers shared by the unit tests and the acceptance driver.

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bkvem/assembly.hpp"
#include "bkvem/element.hpp"
#include "bkvem/mesh.hpp"
#include "bkvem/projectors.hpp"
#include "oracle/oracle.hpp"

namespace testing_support {

using bkvem::Point2;

inline oracle::Element oracle_element(const bkvem::ElementGeometry& g) {
  oracle::Element e;
  e.vertices = g.vertices;
  e.vertex_h = g.vertex_h;
  for (const auto& ed : g.edges) e.sign.push_back(ed.sign);
  return e;
}

// Interior sample points: centroid, and points between it and each vertex.
inline std::vector<Point2> interior_samples(const bkvem::ElementGeometry& g) {
  std::vector<Point2> s{g.centroid};
  for (const Point2& v : g.vertices) {
    s.push_back(g.centroid + 0.5 * (v - g.centroid));
    s.push_back(g.centroid + 0.9 * (v - g.centroid));
  }
  return s;
}

inline double rel_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return 1e300;
  const double scale = std::max(b.cwiseAbs().maxCoeff(), 1e-300);
  return (a - b).cwiseAbs().maxCoeff() / scale;
}

struct Comparison {
  std::vector<std::string> names;
  std::vector<double> errors;
  double worst() const { return errors.empty() ? 0.0 : *std::max_element(errors.begin(), errors.end()); }
  std::string worst_name() const {
    return names.empty() ? "" : names[std::max_element(errors.begin(), errors.end()) - errors.begin()];
  }
  void add(const std::string& n, double e) {
    names.push_back(n);
    errors.push_back(e);
  }
};

// Library projectors and local matrices against the dense oracle.
inline Comparison compare_with_oracle(const bkvem::ElementGeometry& g, bkvem::Family fam, int k, int l,
                                      const bkvem::ModelParams& prm, int gradient_degree = -1) {
  bkvem::ProjectorOptions po;
  po.gradient_degree = gradient_degree;
  po.ritz_degree = l;
  po.low_ritz_degree = k >= 3 && k - 2 <= l ? k - 2 : -1;
  const auto pu = bkvem::compute_deflection_projectors(g, bkvem::SpaceKind::deflection(fam, k), po);
  const auto pp = bkvem::compute_pressure_projectors(g, bkvem::SpaceKind::pressure(fam, l), po);
  const auto loc = bkvem::local_forms(g, pu, pp, prm);

  oracle::Options o;
  o.family = fam;
  o.k = k;
  o.l = l;
  o.gradient_degree = gradient_degree;
  o.ritz_degree = l;
  o.low_ritz_degree = po.low_ritz_degree;
  o.params = prm;
  const std::vector<Point2> s = interior_samples(g);
  const oracle::Result r = oracle::compute(oracle_element(g), o, s);

  const Eigen::MatrixXd eu = pu.basis.eval(s), ep = pp.basis.eval(s);
  auto at = [](const Eigen::MatrixXd& e, const Eigen::MatrixXd& c) {
    return Eigen::MatrixXd(e.leftCols(c.rows()) * c);
  };
  Comparison c;
  c.add("pd_k", rel_diff(at(eu, pu.energy), r.energy));
  c.add("Pi_k", rel_diff(at(eu, pu.l2), r.l2));
  c.add("pg_u", rel_diff(at(eu, pu.ritz), r.ritz));
  for (int a = 0; a < 2; ++a) {
    c.add("grad_u" + std::to_string(a), rel_diff(at(eu, pu.gradient[a]), r.gradient[a]));
    c.add("grad_top_u" + std::to_string(a), rel_diff(at(eu, pu.gradient_top[a]), r.gradient_top[a]));
    c.add("grad_p" + std::to_string(a), rel_diff(at(ep, pp.gradient[a]), r.p_gradient[a]));
  }
  for (int h = 0; h < 3; ++h) c.add("hess" + std::to_string(h), rel_diff(at(eu, pu.hessian[h]), r.hessian[h]));
  c.add("pg_l", rel_diff(at(ep, pp.ritz), r.p_ritz));
  c.add("Pi_l", rel_diff(at(ep, pp.l2), r.p_l2));
  if (po.low_ritz_degree >= 0) c.add("pg_low", rel_diff(at(ep, pp.low_ritz), r.p_low_ritz));
  c.add("A1", rel_diff(loc.a1, r.a1));
  c.add("B", rel_diff(loc.b, r.b));
  c.add("A3", rel_diff(loc.a3, r.a3));
  return c;
}

// Random cells drawn from a Voronoi mesh and from a locally refined copy, so
// that both edge orientations and hanging nodes occur.
inline std::vector<bkvem::ElementGeometry> random_elements(int count, unsigned seed) {
  std::mt19937 rng(seed);
  bkvem::VoronoiOptions vo;
  vo.seed = seed;
  vo.lloyd_iters = 20;
  const auto labeler = bkvem::uniform_labeler(bkvem::BoundaryLabel::Clamped);
  const bkvem::PolygonalMesh vm = bkvem::generate_voronoi(30, {}, vo, labeler);
  std::vector<int> marked;
  for (int c = 0; c < vm.num_cells(); c += 3) marked.push_back(c);
  const bkvem::PolygonalMesh rm = bkvem::refine(vm, marked);
  std::vector<bkvem::ElementGeometry> out;
  for (int i = 0; i < count; ++i) {
    const bkvem::PolygonalMesh& m = i % 2 == 0 ? vm : rm;
    const int c = std::uniform_int_distribution<int>(0, m.num_cells() - 1)(rng);
    out.push_back(bkvem::make_element(m, c, 12));
  }
  return out;
}

}  // namespace testing_support
