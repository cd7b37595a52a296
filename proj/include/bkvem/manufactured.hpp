#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>

#include "bkvem/assembly.hpp"
#include "bkvem/mesh.hpp"
#include "bkvem/spaces.hpp"

namespace bkvem {

using Hessian = std::array<double, 3>;  // xx, xy, yy

struct ExactSolution {
  std::function<double(Point2)> u, p;
  std::function<Point2(Point2)> grad_u, grad_p;
  std::function<Hessian(Point2)> hess_u;
  std::function<double(Point2)> lap_u, bilap_u, lap_p;

  ScalarField deflection_field() const { return {u, grad_u}; }
  ScalarField pressure_field() const { return {p, grad_p}; }
};

enum class DomainKind { UnitSquare, LShape };

struct ManufacturedCase {
  std::string name;
  ExactSolution exact;
  ModelParams params;
  DomainKind domain = DomainKind::UnitSquare;
  BoundaryLabeler labeler;
  bool pressure_dirichlet_everywhere = false;
  std::optional<Point2> singular_point;

  // f~ = u + bilap u + alpha lap p,  g~ = beta p - alpha lap u - gamma lap p
  double f_tilde(Point2 x) const;
  double g_tilde(Point2 x) const;
};

// Names: "ex1", "ex2", "polynomial". Polynomial cases draw u in P_k and
// p in P_l with the given seed on the unit square with the ex1 labels.
ManufacturedCase builtin_case(const std::string& name, const ModelParams& params, int k = 2, int l = 1,
                              unsigned seed = 1);

// Polynomial in raw powers x^a y^b in graded-lex order.
ExactSolution polynomial_solution(const Eigen::VectorXd& u_coeffs, int k, const Eigen::VectorXd& p_coeffs, int l);

}  // namespace bkvem
