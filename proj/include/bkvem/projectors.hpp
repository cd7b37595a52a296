#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "bkvem/element.hpp"
#include "bkvem/polynomial.hpp"
#include "bkvem/spaces.hpp"

namespace bkvem {

// Local DoF positions of an element, matching local_dofs().
struct LocalLayout {
  EntityDofs e;
  int n = 0;
  LocalLayout(SpaceKind s, int n_vertices) : e(entity_dofs(s)), n(n_vertices) {}
  int size() const { return n * (e.per_vertex + e.per_edge()) + e.per_cell; }
  int vertex(int i, int c = 0) const { return i * e.per_vertex + c; }
  int edge_normal(int i, int j) const { return n * e.per_vertex + i * e.per_edge() + j; }
  int edge_value(int i, int j) const { return n * e.per_vertex + i * e.per_edge() + e.edge_normal + j; }
  int cell(int a) const { return n * (e.per_vertex + e.per_edge()) + a; }
};

// Edge trace coefficients in the local edge monomials xi^j (xi in [-1/2,1/2],
// from vertex i to vertex i+1); rows are coefficients, columns local DoFs.
struct EdgeTrace {
  Eigen::MatrixXd value;
  Eigen::MatrixXd normal;  // outward normal derivative; empty for pressure

  int value_degree() const { return static_cast<int>(value.rows()) - 1; }
  int normal_degree() const { return static_cast<int>(normal.rows()) - 1; }
};

struct ProjectorOptions {
  int gradient_degree = -1;   // deflection gradient projection degree; -1 means k-2
  int ritz_degree = -1;       // degree of pg applied to deflection DoFs; -1 means k-1
  int low_ritz_degree = -1;   // degree of pg applied to pressure DoFs; -1 means none
};

struct DeflectionProjectors {
  SpaceKind space;
  int ndof = 0;
  ScaledMonomialBasis basis;       // degree k
  Eigen::MatrixXd dof_matrix;      // ndof x dim P_k, DoFs of the monomials
  Eigen::MatrixXd energy;          // pd_k
  Eigen::MatrixXd l2;              // Pi_k
  int gradient_degree = 0;
  std::array<Eigen::MatrixXd, 2> gradient;
  std::array<Eigen::MatrixXd, 2> gradient_top;  // degree k-1, for the estimator
  std::array<Eigen::MatrixXd, 3> hessian;  // xx, xy, yy of degree k-2
  int ritz_degree = 0;
  Eigen::MatrixXd ritz;
  std::vector<EdgeTrace> traces;
};

struct PressureProjectors {
  SpaceKind space;
  int ndof = 0;
  ScaledMonomialBasis basis;   // degree l
  Eigen::MatrixXd dof_matrix;  // ndof x dim P_l
  Eigen::MatrixXd ritz;        // pg_l
  Eigen::MatrixXd l2;          // Pi_l
  std::array<Eigen::MatrixXd, 2> gradient;  // degree l-1
  int low_ritz_degree = -1;
  Eigen::MatrixXd low_ritz;
  std::vector<EdgeTrace> traces;
};

// Gram matrix of scaled monomials of two degrees on the element.
Eigen::MatrixXd mass_matrix(const ElementGeometry& g, int degree_a, int degree_b);

// DoFs of the scaled monomials of the given degree.
Eigen::MatrixXd dofs_of_monomials(const ElementGeometry& g, SpaceKind space, int degree);

DeflectionProjectors compute_deflection_projectors(const ElementGeometry& g, SpaceKind space,
                                                   const ProjectorOptions& opts = {});
PressureProjectors compute_pressure_projectors(const ElementGeometry& g, SpaceKind space,
                                               const ProjectorOptions& opts = {});

// Row vector evaluating a trace coefficient block at local xi.
Eigen::RowVectorXd trace_row(const Eigen::MatrixXd& coeffs, double xi);

}  // namespace bkvem
