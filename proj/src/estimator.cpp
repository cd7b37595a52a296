#include "bkvem/estimator.hpp"

#include <cmath>

#include "bkvem/parallel.hpp"

namespace bkvem {

double LocalEstimators::total() const {
  double s = 0.0;
  for (double v : eta2) s += v;
  return s;
}

EstimatorResult global_eta(std::vector<LocalEstimators> cells) {
  EstimatorResult r;
  std::array<double, 9> sum{};
  for (const auto& c : cells)
    for (int i = 0; i < 9; ++i) sum[i] += c.eta2[i];
  double total = 0.0;
  for (int i = 0; i < 9; ++i) {
    r.components[i] = std::sqrt(sum[i]);
    total += sum[i];
  }
  r.eta = std::sqrt(total);
  r.cells = std::move(cells);
  return r;
}

namespace {

struct CellFields {
  Eigen::VectorXd energy, l2u;           // pd_k u, Pi_k u
  std::array<Eigen::VectorXd, 2> gu;     // Pi_{k-1} grad u
  Eigen::VectorXd l2p;                   // Pi_l p
  std::array<Eigen::VectorXd, 2> gp;     // Pi_{l-1} grad p
};

struct Eval {
  const Discretization& d;
  const std::vector<CellFields>& f;
  int cell;
  const DeflectionProjectors& pu() const { return d.deflection(cell); }
  const PressureProjectors& pp() const { return d.pressure(cell); }

  Point2 grad_energy(Point2 x) const {
    return {pu().basis.eval(x, 1, 0).dot(f[cell].energy), pu().basis.eval(x, 0, 1).dot(f[cell].energy)};
  }
  double dnn_energy(Point2 x, Point2 n) const { return pu().basis.mixed_second(x, n, n).dot(f[cell].energy); }
  double t_energy(Point2 x, Point2 n, Point2 t) const {
    return pu().basis.edge_operator_t(x, n, t).dot(f[cell].energy);
  }
  Point2 grad_u(Point2 x) const {
    const ScaledMonomialBasis b(pu().basis.center(), pu().basis.h(), pu().space.degree - 1);
    const Eigen::VectorXd v = b.eval(x);
    return {v.dot(f[cell].gu[0]), v.dot(f[cell].gu[1])};
  }
  Point2 grad_p(Point2 x) const {
    const ScaledMonomialBasis b(pp().basis.center(), pp().basis.h(), pp().space.degree - 1);
    const Eigen::VectorXd v = b.eval(x);
    return {v.dot(f[cell].gp[0]), v.dot(f[cell].gp[1])};
  }
  double l2p(Point2 x) const { return pp().basis.eval(x).dot(f[cell].l2p); }
};

double dof_norm2(const Eigen::MatrixXd& dofs, const Eigen::MatrixXd& proj, const Eigen::VectorXd& v) {
  return (v - dofs * (proj * v)).squaredNorm();
}

}  // namespace

EstimatorResult estimate(const Discretization& disc, const Solution& sol, const ProblemData& data) {
  const PolygonalMesh& mesh = disc.mesh();
  const int n = mesh.num_cells();
  const DiscretizationOptions& opt = disc.options();
  const ModelParams& prm = opt.params;
  const bool nonconforming = opt.family == Family::Nonconforming;
  const int k = opt.k;

  std::vector<CellFields> fields(n);
  parallel_for(n, opt.threads, [&](int c) {
    const DeflectionProjectors& pu = disc.deflection(c);
    const PressureProjectors& pp = disc.pressure(c);
    const Eigen::VectorXd ul = disc.local_u(sol, c), pl = disc.local_p(sol, c);
    CellFields& f = fields[c];
    f.energy = pu.energy * ul;
    f.l2u = pu.l2 * ul;
    f.l2p = pp.l2 * pl;
    for (int a = 0; a < 2; ++a) {
      f.gu[a] = pu.gradient_top[a] * ul;
      f.gp[a] = pp.gradient[a] * pl;
    }
  });

  const int vorder = opt.resolved_source_order();
  const int eorder = 2 * k + 2;
  const ExactSolution* ex = data.boundary;
  std::vector<LocalEstimators> out(n);
  parallel_for(n, opt.threads, [&](int c) {
    const ElementGeometry& g = disc.element(c);
    const DeflectionProjectors& pu = disc.deflection(c);
    const PressureProjectors& pp = disc.pressure(c);
    const CellFields& f = fields[c];
    const Eval me{disc, fields, c};
    auto& eta = out[c].eta2;
    const double h = g.h, h2 = h * h;

    // Volume residuals and data oscillation.
    {
      const QuadratureRule r = polygon_rule(g.vertices, g.centroid, vorder);
      const ScaledMonomialBasis bg(g.centroid, g.h, k - 1);
      const ScaledMonomialBasis bp(g.centroid, g.h, pp.space.degree - 1);
      const Eigen::MatrixXd mk = mass_matrix(g, k, k);
      const Eigen::MatrixXd ml = mass_matrix(g, pp.space.degree, pp.space.degree);
      Eigen::VectorXd fm = Eigen::VectorXd::Zero(pu.basis.size()), gm = Eigen::VectorXd::Zero(pp.basis.size());
      std::vector<double> fv(r.size(), 0.0), gv(r.size(), 0.0);
      for (std::size_t q = 0; q < r.size(); ++q) {
        const Point2 x = r.points[q];
        if (data.f) fv[q] = data.f(x);
        if (data.g) gv[q] = data.g(x);
        fm += r.weights[q] * fv[q] * pu.basis.eval(x);
        gm += r.weights[q] * gv[q] * pp.basis.eval(x);
      }
      const Eigen::VectorXd fproj = mk.ldlt().solve(fm), gproj = ml.ldlt().solve(gm);
      double of = 0, og = 0, rf = 0, rg = 0;
      for (std::size_t q = 0; q < r.size(); ++q) {
        const Point2 x = r.points[q];
        const double w = r.weights[q];
        const double df = fv[q] - pu.basis.eval(x).dot(fproj);
        const double dg = gv[q] - pp.basis.eval(x).dot(gproj);
        const double div_gp = bp.eval(x, 1, 0).dot(f.gp[0]) + bp.eval(x, 0, 1).dot(f.gp[1]);
        const double div_gu = bg.eval(x, 1, 0).dot(f.gu[0]) + bg.eval(x, 0, 1).dot(f.gu[1]);
        const double res_f = fv[q] - pu.basis.bilaplacian(x).dot(f.energy) - pu.basis.eval(x).dot(f.l2u) -
                             prm.alpha * div_gp;
        const double res_g = gv[q] + prm.gamma * div_gp - prm.beta * pp.basis.eval(x).dot(f.l2p) +
                             prm.alpha * div_gu;
        of += w * df * df;
        og += w * dg * dg;
        rf += w * res_f * res_f;
        rg += w * res_g * res_g;
      }
      eta[0] = h2 * h2 * (of + rf);
      eta[1] = h2 * (og + rg);
    }

    // Edge jumps.
    const LineRule lr = line_rule(eorder);
    for (std::size_t i = 0; i < g.edges.size(); ++i) {
      const ElementEdge& e = g.edges[i];
      const Edge& ge = mesh.edge(e.global);
      const bool interior = ge.right >= 0;
      const int other = interior ? (ge.left == c ? ge.right : ge.left) : -1;
      const bool simply = e.label == BoundaryLabel::SimplySupported;
      const bool clamped = e.label == BoundaryLabel::Clamped;
      const bool pressure_dirichlet = !interior && (simply || opt.pressure_dirichlet_everywhere);
      const bool pressure_natural = clamped && !opt.pressure_dirichlet_everywhere;
      double j3 = 0, j4 = 0, j5 = 0, j8 = 0;
      for (std::size_t q = 0; q < lr.xi.size(); ++q) {
        const Point2 x = e.point(lr.xi[q]);
        const double w = e.length * lr.weights[q];
        const Point2 nn = e.n, tt = e.t;
        const double dnn = me.dnn_energy(x, nn);
        const double tval = me.t_energy(x, nn, tt) + prm.alpha * dot(me.grad_p(x), nn);
        const double flux = prm.alpha * dot(me.grad_u(x), nn) + prm.gamma * dot(me.grad_p(x), nn);
        const Point2 gP = me.grad_energy(x);
        const double p0 = me.l2p(x);
        if (interior) {
          const Eval nb{disc, fields, other};
          const double a = dnn - nb.dnn_energy(x, nn);
          const double b = tval - (nb.t_energy(x, nn, tt) + prm.alpha * dot(nb.grad_p(x), nn));
          const double fl = flux - (prm.alpha * dot(nb.grad_u(x), nn) + prm.gamma * dot(nb.grad_p(x), nn));
          const Point2 dg = gP - nb.grad_energy(x);
          const double dp = p0 - nb.l2p(x);
          j3 += w * a * a;
          j4 += w * b * b;
          j5 += w * fl * fl;
          j8 += w * (dot(dg, dg) + dp * dp);
          continue;
        }
        if (simply) {
          double exact_dnn = 0.0;
          if (ex) {
            const Hessian hs = ex->hess_u(x);
            exact_dnn = hs[0] * nn.x * nn.x + 2 * hs[1] * nn.x * nn.y + hs[2] * nn.y * nn.y;
          }
          const double a = dnn - exact_dnn;
          j3 += w * a * a;
        }
        if (pressure_natural) {
          double exact_flux = 0.0;
          if (ex) exact_flux = prm.alpha * dot(ex->grad_u(x), nn) + prm.gamma * dot(ex->grad_p(x), nn);
          const double fl = flux - exact_flux;
          j5 += w * fl * fl;
        }
        const Point2 gu_ex = ex ? ex->grad_u(x) : Point2{};
        const Point2 dg = gP - gu_ex;
        if (clamped) j8 += w * dot(dg, dg);
        else j8 += w * dot(dg, tt) * dot(dg, tt);
        if (pressure_dirichlet) {
          const double dp = p0 - (ex ? ex->p(x) : 0.0);
          j8 += w * dp * dp;
        }
      }
      eta[2] += e.length * j3;
      eta[3] += e.length * e.length * e.length * j4;
      eta[4] += e.length * j5;
      if (nonconforming) eta[7] += j8 / e.length;
    }

    // Stabilization and DoF-based terms.
    const Eigen::VectorXd ul = disc.local_u(sol, c), pl = disc.local_p(sol, c);
    const double sa = 1.0 + std::sqrt(prm.alpha) * h + h2;
    eta[5] = sa * sa * dof_norm2(pu.dof_matrix, pu.energy, ul) / h2 +
             prm.gamma * dof_norm2(pp.dof_matrix, pp.ritz, pl) +
             prm.beta * h2 * dof_norm2(pp.dof_matrix, pp.l2, pl);
    const Eigen::MatrixXd du = dofs_of_monomials(g, pu.space, pu.ritz_degree);
    eta[6] = prm.alpha * dof_norm2(du, pu.ritz, ul);
    if (nonconforming && k >= 3 && pp.low_ritz_degree >= 0) {
      const Eigen::MatrixXd dp = dofs_of_monomials(g, pp.space, pp.low_ritz_degree);
      eta[8] = prm.alpha * h2 * dof_norm2(dp, pp.low_ritz, pl);
    }
  });
  return global_eta(std::move(out));
}

}  // namespace bkvem
