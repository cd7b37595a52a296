#include "bkvem/polynomial.hpp"

#include <cassert>

namespace bkvem {

namespace {

double falling(int p, int a) {
  double r = 1.0;
  for (int i = 0; i < a; ++i) r *= (p - i);
  return r;
}

}  // namespace

std::pair<int, int> monomial_exponent(int index) {
  int n = 0;
  while (poly_dim(n) <= index) ++n;
  const int py = index - poly_dim(n - 1);
  return {n - py, py};
}

ScaledMonomialBasis::ScaledMonomialBasis(Point2 center, double h, int degree)
    : center_(center), h_(h), degree_(degree) {
  if (h <= 0.0) throw Error("scaled monomial basis needs h > 0");
  if (degree < 0 || degree > 15) throw Error("scaled monomial basis degree out of range");
}

void ScaledMonomialBasis::eval(Point2 x, int dx, int dy, double* out) const {
  const double xi = (x.x - center_.x) / h_;
  const double eta = (x.y - center_.y) / h_;
  double px[16], py[16];
  px[0] = py[0] = 1.0;
  for (int i = 1; i <= degree_; ++i) {
    px[i] = px[i - 1] * xi;
    py[i] = py[i - 1] * eta;
  }
  const double scale = std::pow(h_, -(dx + dy));
  int idx = 0;
  for (int n = 0; n <= degree_; ++n) {
    for (int b = 0; b <= n; ++b, ++idx) {
      const int a = n - b;
      if (a < dx || b < dy) {
        out[idx] = 0.0;
        continue;
      }
      out[idx] = scale * falling(a, dx) * falling(b, dy) * px[a - dx] * py[b - dy];
    }
  }
}

Eigen::VectorXd ScaledMonomialBasis::eval(Point2 x, int dx, int dy) const {
  Eigen::VectorXd v(size());
  eval(x, dx, dy, v.data());
  return v;
}

Eigen::MatrixXd ScaledMonomialBasis::eval(std::span<const Point2> pts, int dx, int dy) const {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(pts.size()), size());
  Eigen::VectorXd row(size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    eval(pts[i], dx, dy, row.data());
    m.row(static_cast<Eigen::Index>(i)) = row.transpose();
  }
  return m;
}

Eigen::VectorXd ScaledMonomialBasis::laplacian(Point2 x) const {
  return eval(x, 2, 0) + eval(x, 0, 2);
}

Eigen::VectorXd ScaledMonomialBasis::bilaplacian(Point2 x) const {
  return eval(x, 4, 0) + 2.0 * eval(x, 2, 2) + eval(x, 0, 4);
}

Eigen::VectorXd ScaledMonomialBasis::edge_operator_t(Point2 x, Point2 n, Point2 t) const {
  // d_n lap m + d_n (t^T H t) written with third derivatives.
  const Eigen::VectorXd dxxx = eval(x, 3, 0);
  const Eigen::VectorXd dxxy = eval(x, 2, 1);
  const Eigen::VectorXd dxyy = eval(x, 1, 2);
  const Eigen::VectorXd dyyy = eval(x, 0, 3);
  Eigen::VectorXd r = n.x * (dxxx + dxyy) + n.y * (dxxy + dyyy);
  // sum_ijl n_i t_j t_l d_ijl
  const double cxxx = n.x * t.x * t.x;
  const double cxxy = n.x * 2.0 * t.x * t.y + n.y * t.x * t.x;
  const double cxyy = n.x * t.y * t.y + n.y * 2.0 * t.x * t.y;
  const double cyyy = n.y * t.y * t.y;
  r += cxxx * dxxx + cxxy * dxxy + cxyy * dxyy + cyyy * dyyy;
  return r;
}

Eigen::VectorXd ScaledMonomialBasis::mixed_second(Point2 x, Point2 n, Point2 t) const {
  return n.x * t.x * eval(x, 2, 0) + (n.x * t.y + n.y * t.x) * eval(x, 1, 1) +
         n.y * t.y * eval(x, 0, 2);
}

Eigen::MatrixXd ScaledMonomialBasis::derivative_matrix(int dx, int dy) const {
  const int target = degree_ - dx - dy;
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(poly_dim(target), size());
  const double scale = std::pow(h_, -(dx + dy));
  for (int j = 0; j < size(); ++j) {
    const auto [a, b] = monomial_exponent(j);
    if (a < dx || b < dy) continue;
    d(monomial_index(a - dx, b - dy), j) = scale * falling(a, dx) * falling(b, dy);
  }
  return d;
}

double Polynomial::derivative(Point2 x, int dx, int dy) const {
  return basis.eval(x, dx, dy).dot(coeffs);
}

Eigen::VectorXd edge_monomials(double xi, int degree) {
  Eigen::VectorXd v(std::max(degree + 1, 0));
  double r = 1.0;
  for (int j = 0; j <= degree; ++j) {
    v[j] = r;
    r *= xi;
  }
  return v;
}

Eigen::VectorXd edge_monomials_derivative(double xi, int degree) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(std::max(degree + 1, 0));
  double r = 1.0;
  for (int j = 1; j <= degree; ++j) {
    v[j] = j * r;
    r *= xi;
  }
  return v;
}

}  // namespace bkvem
