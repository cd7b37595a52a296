#include "bkvem/errors.hpp"

#include <cmath>
#include <limits>

#include "bkvem/csv.hpp"
#include "bkvem/parallel.hpp"

namespace bkvem {

namespace {

struct CellErrors {
  double u_l2 = 0, u_h2 = 0, p_l2 = 0, p_h1 = 0, osc_f = 0, osc_g = 0;
};

bool touches(const ElementGeometry& g, const std::optional<Point2>& p) {
  if (!p) return false;
  for (const Point2& v : g.vertices)
    if (distance(v, *p) < 1e-12) return true;
  return false;
}

// ||f - Pi f||^2 on the element for the L2 projection onto the basis.
double oscillation(const QuadratureRule& r, const ScaledMonomialBasis& b, const std::function<double(Point2)>& f) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(b.size(), b.size());
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(b.size());
  std::vector<double> fv(r.size());
  for (std::size_t q = 0; q < r.size(); ++q) {
    const Eigen::VectorXd v = b.eval(r.points[q]);
    fv[q] = f(r.points[q]);
    m += r.weights[q] * v * v.transpose();
    rhs += r.weights[q] * fv[q] * v;
  }
  const Eigen::VectorXd c = m.ldlt().solve(rhs);
  double s = 0.0;
  for (std::size_t q = 0; q < r.size(); ++q) {
    const double d = fv[q] - b.eval(r.points[q]).dot(c);
    s += r.weights[q] * d * d;
  }
  return s;
}

}  // namespace

ErrorReport compute_errors(const Discretization& disc, const Solution& sol, const ManufacturedCase& cs) {
  const int n = disc.mesh().num_cells();
  const int order = disc.options().resolved_source_order();
  const ExactSolution& ex = cs.exact;
  std::vector<CellErrors> per(n);
  parallel_for(n, disc.options().threads, [&](int c) {
    const ElementGeometry& g = disc.element(c);
    const DeflectionProjectors& pu = disc.deflection(c);
    const PressureProjectors& pp = disc.pressure(c);
    const Eigen::VectorXd ul = disc.local_u(sol, c), pl = disc.local_p(sol, c);
    const Eigen::VectorXd energy = pu.energy * ul, l2u = pu.l2 * ul;
    const Eigen::VectorXd ritz = pp.ritz * pl, l2p = pp.l2 * pl;
    const QuadratureRule r = polygon_rule(g.vertices, g.centroid, order, touches(g, cs.singular_point) ? 1 : 0);
    CellErrors& e = per[c];
    for (std::size_t q = 0; q < r.size(); ++q) {
      const Point2 x = r.points[q];
      const double w = r.weights[q];
      const double du = ex.u(x) - pu.basis.eval(x).dot(l2u);
      const Hessian hs = ex.hess_u(x);
      const double dxx = hs[0] - pu.basis.eval(x, 2, 0).dot(energy);
      const double dxy = hs[1] - pu.basis.eval(x, 1, 1).dot(energy);
      const double dyy = hs[2] - pu.basis.eval(x, 0, 2).dot(energy);
      const double dp = ex.p(x) - pp.basis.eval(x).dot(l2p);
      const Point2 gp = ex.grad_p(x);
      const double dpx = gp.x - pp.basis.eval(x, 1, 0).dot(ritz);
      const double dpy = gp.y - pp.basis.eval(x, 0, 1).dot(ritz);
      e.u_l2 += w * du * du;
      e.u_h2 += w * (dxx * dxx + 2 * dxy * dxy + dyy * dyy);
      e.p_l2 += w * dp * dp;
      e.p_h1 += w * (dpx * dpx + dpy * dpy);
    }
    const double h2 = g.h * g.h;
    e.osc_f = h2 * h2 * oscillation(r, pu.basis, [&](Point2 x) { return cs.f_tilde(x); });
    e.osc_g = h2 * oscillation(r, pp.basis, [&](Point2 x) { return cs.g_tilde(x); });
  });
  CellErrors sum;
  for (const CellErrors& e : per) {
    sum.u_l2 += e.u_l2;
    sum.u_h2 += e.u_h2;
    sum.p_l2 += e.p_l2;
    sum.p_h1 += e.p_h1;
    sum.osc_f += e.osc_f;
    sum.osc_g += e.osc_g;
  }
  const ModelParams& prm = disc.options().params;
  ErrorReport rep;
  rep.h = disc.mesh().h();
  rep.ndof = disc.num_dofs();
  rep.u_l2 = std::sqrt(sum.u_l2);
  rep.u_h2 = std::sqrt(sum.u_h2);
  rep.p_l2 = std::sqrt(sum.p_l2);
  rep.p_h1 = std::sqrt(sum.p_h1);
  rep.energy = std::sqrt(sum.u_l2 + sum.u_h2 + prm.beta * sum.p_l2 + prm.gamma * sum.p_h1);
  rep.osc_f = std::sqrt(sum.osc_f);
  rep.osc_g = std::sqrt(sum.osc_g);
  return rep;
}

std::vector<double> convergence_rates(const std::vector<double>& h, const std::vector<double>& e) {
  if (h.size() != e.size()) throw Error("rate table: size mismatch");
  std::vector<double> r(h.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 0; i + 1 < h.size(); ++i) {
    if (h[i] == h[i + 1]) throw Error("rate table: equal h values");
    r[i] = std::log(e[i + 1] / e[i]) / std::log(h[i + 1] / h[i]);
  }
  return r;
}

RateTable rate_table(const std::vector<ErrorReport>& reports) {
  if (reports.size() < 2) throw Error("rate table needs at least two reports");
  RateTable t;
  t.columns = {"u_l2", "u_h2", "p_l2", "p_h1", "energy"};
  t.errors.assign(t.columns.size(), {});
  for (const ErrorReport& r : reports) {
    t.h.push_back(r.h);
    t.ndof.push_back(r.ndof);
    const double v[] = {r.u_l2, r.u_h2, r.p_l2, r.p_h1, r.energy};
    for (std::size_t c = 0; c < t.columns.size(); ++c) t.errors[c].push_back(v[c]);
  }
  for (const auto& col : t.errors) t.rates.push_back(convergence_rates(t.h, col));
  return t;
}

void write_csv(const RateTable& t, std::ostream& out) {
  out << "h,ndof";
  for (const auto& c : t.columns) out << ',' << c << ",rate_" << c;
  out << '\n';
  for (std::size_t i = 0; i < t.h.size(); ++i) {
    out << csv_number(t.h[i]) << ',' << t.ndof[i];
    for (std::size_t c = 0; c < t.columns.size(); ++c)
      out << ',' << csv_number(t.errors[c][i]) << ',' << csv_number(t.rates[c][i]);
    out << '\n';
  }
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw Error("slope fit needs at least two points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace bkvem
