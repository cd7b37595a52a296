#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "bkvem/geometry.hpp"

namespace bkvem {

inline int poly_dim(int degree) { return degree < 0 ? 0 : (degree + 1) * (degree + 2) / 2; }

// Graded lexicographic order: (0,0), (1,0), (0,1), (2,0), (1,1), (0,2), ...
inline int monomial_index(int px, int py) { return poly_dim(px + py - 1) + py; }
std::pair<int, int> monomial_exponent(int index);

// Monomials ((x - c) / h)^a, nested across degrees so that the first
// poly_dim(d) entries of a degree-D basis are the degree-d basis.
class ScaledMonomialBasis {
 public:
  ScaledMonomialBasis() = default;
  ScaledMonomialBasis(Point2 center, double h, int degree);

  Point2 center() const { return center_; }
  double h() const { return h_; }
  int degree() const { return degree_; }
  int size() const { return poly_dim(degree_); }

  // d^(dx+dy) / dx^dx dy^dy of every basis monomial at x.
  Eigen::VectorXd eval(Point2 x, int dx = 0, int dy = 0) const;
  void eval(Point2 x, int dx, int dy, double* out) const;
  // rows = points, cols = monomials
  Eigen::MatrixXd eval(std::span<const Point2> pts, int dx = 0, int dy = 0) const;

  Eigen::VectorXd laplacian(Point2 x) const;
  Eigen::VectorXd bilaplacian(Point2 x) const;
  // T(m) = d_n(lap m + d_tt m) for unit normal n and tangent t.
  Eigen::VectorXd edge_operator_t(Point2 x, Point2 n, Point2 t) const;
  // n^T hess(m) t
  Eigen::VectorXd mixed_second(Point2 x, Point2 n, Point2 t) const;

  // Maps coefficients in this basis to coefficients of the derivative, in
  // the same frame, of degree degree() - dx - dy.
  Eigen::MatrixXd derivative_matrix(int dx, int dy) const;

 private:
  Point2 center_{};
  double h_ = 1.0;
  int degree_ = 0;
};

// A polynomial in a scaled monomial frame.
struct Polynomial {
  ScaledMonomialBasis basis;
  Eigen::VectorXd coeffs;

  double value(Point2 x) const { return derivative(x, 0, 0); }
  double derivative(Point2 x, int dx, int dy) const;
};

// Edge monomials xi^j with xi = (s - h_e/2) / h_e in [-1/2, 1/2].
inline double edge_monomial(double xi, int j) {
  double r = 1.0;
  for (int i = 0; i < j; ++i) r *= xi;
  return r;
}
Eigen::VectorXd edge_monomials(double xi, int degree);
Eigen::VectorXd edge_monomials_derivative(double xi, int degree);

}  // namespace bkvem
