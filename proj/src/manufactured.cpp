#include "bkvem/manufactured.hpp"

#include <complex>
#include <numbers>
#include <random>

#include "bkvem/polynomial.hpp"

namespace bkvem {

double ManufacturedCase::f_tilde(Point2 x) const {
  return exact.u(x) + exact.bilap_u(x) + params.alpha * exact.lap_p(x);
}

double ManufacturedCase::g_tilde(Point2 x) const {
  return params.beta * exact.p(x) - params.alpha * exact.lap_u(x) - params.gamma * exact.lap_p(x);
}

namespace {

constexpr double pi = std::numbers::pi;

ExactSolution example1() {
  // u = S(x) S(y) with S = sin^2(pi .), p = cos(pi x y)
  auto s0 = [](double t) { return std::pow(std::sin(pi * t), 2); };
  auto s1 = [](double t) { return pi * std::sin(2 * pi * t); };
  auto s2 = [](double t) { return 2 * pi * pi * std::cos(2 * pi * t); };
  auto s4 = [](double t) { return -8 * std::pow(pi, 4) * std::cos(2 * pi * t); };
  ExactSolution e;
  e.u = [=](Point2 x) { return s0(x.x) * s0(x.y); };
  e.grad_u = [=](Point2 x) { return Point2{s1(x.x) * s0(x.y), s0(x.x) * s1(x.y)}; };
  e.hess_u = [=](Point2 x) {
    return Hessian{s2(x.x) * s0(x.y), s1(x.x) * s1(x.y), s0(x.x) * s2(x.y)};
  };
  e.lap_u = [=](Point2 x) { return s2(x.x) * s0(x.y) + s0(x.x) * s2(x.y); };
  e.bilap_u = [=](Point2 x) { return s4(x.x) * s0(x.y) + 2 * s2(x.x) * s2(x.y) + s0(x.x) * s4(x.y); };
  e.p = [](Point2 x) { return std::cos(pi * x.x * x.y); };
  e.grad_p = [](Point2 x) {
    const double s = std::sin(pi * x.x * x.y);
    return Point2{-pi * x.y * s, -pi * x.x * s};
  };
  e.lap_p = [](Point2 x) { return -pi * pi * (x.x * x.x + x.y * x.y) * std::cos(pi * x.x * x.y); };
  return e;
}

// Im(z^lambda) on the L-shape, with the branch cut along the removed
// quadrant (theta in [0, 3 pi / 2]).
struct Harmonic {
  double lambda;
  std::complex<double> power(Point2 x, double exponent) const {
    const double r = std::hypot(x.x, x.y);
    if (r == 0.0) return 0.0;
    double th = std::atan2(x.y, x.x);
    if (th < -pi / 2 + 1e-14) th += 2 * pi;
    return std::polar(std::pow(r, exponent), exponent * th);
  }
  double value(Point2 x) const { return power(x, lambda).imag(); }
  Point2 gradient(Point2 x) const {
    const std::complex<double> d = lambda * power(x, lambda - 1);
    return {d.imag(), d.real()};
  }
  Hessian hessian(Point2 x) const {
    const std::complex<double> d = lambda * (lambda - 1) * power(x, lambda - 2);
    return {d.imag(), d.real(), -d.imag()};
  }
};

ExactSolution example2() {
  const Harmonic hu{5.0 / 3.0}, hp{2.0 / 3.0};
  ExactSolution e;
  e.u = [=](Point2 x) { return hu.value(x); };
  e.grad_u = [=](Point2 x) { return hu.gradient(x); };
  e.hess_u = [=](Point2 x) { return hu.hessian(x); };
  e.lap_u = [](Point2) { return 0.0; };
  e.bilap_u = [](Point2) { return 0.0; };
  e.p = [=](Point2 x) { return hp.value(x); };
  e.grad_p = [=](Point2 x) { return hp.gradient(x); };
  e.lap_p = [](Point2) { return 0.0; };
  return e;
}

}  // namespace

ExactSolution polynomial_solution(const Eigen::VectorXd& uc, int k, const Eigen::VectorXd& pc, int l) {
  const Polynomial pu{ScaledMonomialBasis({0.0, 0.0}, 1.0, k), uc};
  const Polynomial pp{ScaledMonomialBasis({0.0, 0.0}, 1.0, l), pc};
  ExactSolution e;
  e.u = [pu](Point2 x) { return pu.value(x); };
  e.grad_u = [pu](Point2 x) { return Point2{pu.derivative(x, 1, 0), pu.derivative(x, 0, 1)}; };
  e.hess_u = [pu](Point2 x) {
    return Hessian{pu.derivative(x, 2, 0), pu.derivative(x, 1, 1), pu.derivative(x, 0, 2)};
  };
  e.lap_u = [pu](Point2 x) { return pu.derivative(x, 2, 0) + pu.derivative(x, 0, 2); };
  e.bilap_u = [pu](Point2 x) {
    return pu.derivative(x, 4, 0) + 2 * pu.derivative(x, 2, 2) + pu.derivative(x, 0, 4);
  };
  e.p = [pp](Point2 x) { return pp.value(x); };
  e.grad_p = [pp](Point2 x) { return Point2{pp.derivative(x, 1, 0), pp.derivative(x, 0, 1)}; };
  e.lap_p = [pp](Point2 x) { return pp.derivative(x, 2, 0) + pp.derivative(x, 0, 2); };
  return e;
}

ManufacturedCase builtin_case(const std::string& name, const ModelParams& params, int k, int l, unsigned seed) {
  ManufacturedCase c;
  c.name = name;
  c.params = params;
  if (name == "ex1") {
    c.exact = example1();
    c.labeler = example1_labeler();
  } else if (name == "ex2") {
    c.exact = example2();
    c.domain = DomainKind::LShape;
    c.labeler = uniform_labeler(BoundaryLabel::Clamped);
    c.pressure_dirichlet_everywhere = true;
    c.singular_point = Point2{0.0, 0.0};
  } else if (name == "polynomial") {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    Eigen::VectorXd uc(poly_dim(k)), pc(poly_dim(l));
    for (auto& v : uc) v = unif(rng);
    for (auto& v : pc) v = unif(rng);
    c.exact = polynomial_solution(uc, k, pc, l);
    c.labeler = example1_labeler();
  } else {
    throw Error("unknown case '" + name + "'");
  }
  return c;
}

}  // namespace bkvem
