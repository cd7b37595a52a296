#include "bkvem/assembly.hpp"

#include <fstream>
#include <iomanip>

#include <Eigen/SparseLU>
#include <unsupported/Eigen/IterativeSolvers>

namespace bkvem {

void ModelParams::validate(bool allow) const {
  if (!std::isfinite(alpha) || !std::isfinite(beta) || !std::isfinite(gamma))
    throw Error("model parameters must be finite");
  if (allow) return;
  if (!(alpha > 0.0 && alpha <= 1.0)) throw Error("alpha must lie in (0, 1]");
  if (!(beta >= 1.0)) throw Error("beta must be >= 1");
  if (!(gamma >= 1.0)) throw Error("gamma must be >= 1");
}

ModelParams derive_params(double lambda, double mu, double c0, double alpha) {
  if (!(mu > 0.0)) throw Error("mu must be positive");
  if (lambda < 0.0 || c0 < 0.0) throw Error("lambda and c0 must be nonnegative");
  ModelParams p;
  p.alpha = alpha;
  p.gamma = (lambda + mu) / mu;
  p.beta = (c0 * (lambda + 2.0 * mu) + alpha * alpha) * p.gamma;
  return p;
}

Eigen::MatrixXd dofi_dofi(const Eigen::MatrixXd& d, const Eigen::MatrixXd& proj, double scale) {
  const Eigen::MatrixXd r = Eigen::MatrixXd::Identity(d.rows(), d.rows()) - d * proj;
  return scale * r.transpose() * r;
}

DeflectionFormTerms deflection_form_terms(const ElementGeometry& g, const DeflectionProjectors& p) {
  const int k = p.space.degree;
  DeflectionFormTerms t;
  const Eigen::MatrixXd mk = mass_matrix(g, k, k);
  t.l2 = p.l2.transpose() * mk * p.l2;
  t.l2_stab = dofi_dofi(p.dof_matrix, p.l2, g.h * g.h);
  const Eigen::MatrixXd m2 = mass_matrix(g, k - 2, k - 2);
  const double w[3] = {1.0, 2.0, 1.0};
  t.hessian = Eigen::MatrixXd::Zero(p.ndof, p.ndof);
  for (int c = 0; c < 3; ++c) t.hessian += w[c] * p.hessian[c].transpose() * m2 * p.hessian[c];
  t.hessian_stab = dofi_dofi(p.dof_matrix, p.energy, 1.0 / (g.h * g.h));
  return t;
}

LocalMatrices local_forms(const ElementGeometry& g, const DeflectionProjectors& pu,
                          const PressureProjectors& pp, const ModelParams& prm) {
  LocalMatrices lm;
  const DeflectionFormTerms t = deflection_form_terms(g, pu);
  lm.a1 = t.l2 + t.l2_stab + t.hessian + t.hessian_stab;

  const int l = pp.space.degree;
  const Eigen::MatrixXd mixed = mass_matrix(g, pu.gradient_degree, l - 1);
  lm.b = Eigen::MatrixXd::Zero(pu.ndof, pp.ndof);
  if (prm.alpha != 0.0)
    for (int a = 0; a < 2; ++a) lm.b += prm.alpha * pu.gradient[a].transpose() * mixed * pp.gradient[a];

  const Eigen::MatrixXd ml = mass_matrix(g, l, l);
  const Eigen::MatrixXd ml1 = mass_matrix(g, l - 1, l - 1);
  lm.a3 = prm.beta * (pp.l2.transpose() * ml * pp.l2 + dofi_dofi(pp.dof_matrix, pp.l2, g.h * g.h));
  Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(pp.ndof, pp.ndof);
  for (int a = 0; a < 2; ++a) grad += pp.gradient[a].transpose() * ml1 * pp.gradient[a];
  lm.a3 += prm.gamma * (grad + dofi_dofi(pp.dof_matrix, pp.ritz, 1.0));
  lm.f = Eigen::VectorXd::Zero(pu.ndof);
  lm.g = Eigen::VectorXd::Zero(pp.ndof);
  return lm;
}

Eigen::VectorXd local_rhs(const ElementGeometry& g, const ScaledMonomialBasis& basis, const Eigen::MatrixXd& l2,
                          const SourceFn& f, int order) {
  if (!f) return Eigen::VectorXd::Zero(l2.cols());
  const QuadratureRule r = polygon_rule(g.vertices, g.centroid, order);
  Eigen::VectorXd mom = Eigen::VectorXd::Zero(basis.size());
  for (std::size_t q = 0; q < r.size(); ++q) mom += (r.weights[q] * f(r.points[q])) * basis.eval(r.points[q]);
  return l2.transpose() * mom;
}

namespace {

template <class Visit>
void visit_blocks(const DofMap& umap, const DofMap& pmap, const std::vector<LocalMatrices>& locals, Visit&& visit) {
  const int nu = umap.total;
  for (std::size_t c = 0; c < locals.size(); ++c) {
    const LocalMatrices& lm = locals[c];
    const auto& ud = umap.cell_dofs[c];
    const auto& pd = pmap.cell_dofs[c];
    const int su = static_cast<int>(ud.size()), sp = static_cast<int>(pd.size());
    for (int i = 0; i < su; ++i) {
      for (int j = 0; j < su; ++j) visit(ud[i], ud[j], lm.a1(i, j));
      for (int j = 0; j < sp; ++j) visit(ud[i], nu + pd[j], -lm.b(i, j));
    }
    for (int i = 0; i < sp; ++i) {
      for (int j = 0; j < su; ++j) visit(nu + pd[i], ud[j], lm.b(j, i));
      for (int j = 0; j < sp; ++j) visit(nu + pd[i], nu + pd[j], lm.a3(i, j));
    }
  }
}

}  // namespace

GlobalSystem assemble(const DofMap& umap, const DofMap& pmap, const std::vector<LocalMatrices>& locals) {
  if (umap.cell_dofs.size() != locals.size() || pmap.cell_dofs.size() != locals.size())
    throw Error("assemble: element count mismatch");
  GlobalSystem s;
  s.n_u = umap.total;
  s.n_p = pmap.total;
  const int n = s.n_u + s.n_p;
  s.global_to_free.assign(n, -1);
  s.prescribed = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) {
    const bool con = i < s.n_u ? umap.constrained[i] : pmap.constrained[i - s.n_u];
    if (con) {
      s.prescribed[i] = i < s.n_u ? umap.prescribed[i] : pmap.prescribed[i - s.n_u];
    } else {
      s.global_to_free[i] = static_cast<int>(s.free_to_global.size());
      s.free_to_global.push_back(i);
    }
  }
  const int nf = static_cast<int>(s.free_to_global.size());
  s.rhs = Eigen::VectorXd::Zero(nf);
  std::vector<Eigen::Triplet<double>> trip;
  visit_blocks(umap, pmap, locals, [&](int r, int c, double v) {
    if (r < 0 || r >= n || c < 0 || c >= n) throw Error("assemble: index out of range");
    const int fr = s.global_to_free[r];
    if (fr < 0) return;
    const int fc = s.global_to_free[c];
    if (fc >= 0) trip.emplace_back(fr, fc, v);
    else s.rhs[fr] -= v * s.prescribed[c];
  });
  for (std::size_t c = 0; c < locals.size(); ++c) {
    const auto& ud = umap.cell_dofs[c];
    const auto& pd = pmap.cell_dofs[c];
    for (std::size_t i = 0; i < ud.size(); ++i)
      if (const int fr = s.global_to_free[ud[i]]; fr >= 0) s.rhs[fr] += locals[c].f[i];
    for (std::size_t i = 0; i < pd.size(); ++i)
      if (const int fr = s.global_to_free[s.n_u + pd[i]]; fr >= 0) s.rhs[fr] += locals[c].g[i];
  }
  s.matrix.resize(nf, nf);
  s.matrix.setFromTriplets(trip.begin(), trip.end());
  s.matrix.makeCompressed();
  return s;
}

Eigen::SparseMatrix<double> assemble_full(const DofMap& umap, const DofMap& pmap,
                                          const std::vector<LocalMatrices>& locals) {
  const int n = umap.total + pmap.total;
  std::vector<Eigen::Triplet<double>> trip;
  visit_blocks(umap, pmap, locals, [&](int r, int c, double v) { trip.emplace_back(r, c, v); });
  Eigen::SparseMatrix<double> m(n, n);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

Eigen::VectorXd solve(const GlobalSystem& s, const SolverOptions& opts, SolveReport* report) {
  Eigen::VectorXd x = s.prescribed;
  const int nf = static_cast<int>(s.free_to_global.size());
  if (nf == 0) {
    if (report) *report = {};
    return x;
  }
  Eigen::VectorXd y;
  int iterations = 0;
  if (opts.method == SolverMethod::DirectLU) {
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(s.matrix);
    if (lu.info() != Eigen::Success) throw Error("sparse LU factorization failed: " + lu.lastErrorMessage());
    y = lu.solve(s.rhs);
    if (lu.info() != Eigen::Success) throw Error("sparse LU solve failed");
  } else {
    Eigen::GMRES<Eigen::SparseMatrix<double>, Eigen::IncompleteLUT<double>> gm;
    gm.set_restart(opts.restart);
    gm.setTolerance(opts.tolerance);
    gm.setMaxIterations(opts.max_iterations);
    gm.compute(s.matrix);
    y = gm.solve(s.rhs);
    iterations = static_cast<int>(gm.iterations());
    if (gm.info() != Eigen::Success) {
      throw Error("GMRES did not converge: iterations " + std::to_string(gm.iterations()) +
                  ", estimated residual " + std::to_string(gm.error()));
    }
  }
  const double bnorm = s.rhs.norm();
  const double res = (s.matrix * y - s.rhs).norm() / (bnorm > 0 ? bnorm : 1.0);
  if (report) *report = {res, iterations};
  for (int i = 0; i < nf; ++i) x[s.free_to_global[i]] = y[i];
  return x;
}

void write_matrix_market(const Eigen::SparseMatrix<double>& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << m.rows() << ' ' << m.cols() << ' ' << m.nonZeros() << '\n';
  out << std::setprecision(17);
  for (int k = 0; k < m.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(m, k); it; ++it)
      out << it.row() + 1 << ' ' << it.col() + 1 << ' ' << it.value() << '\n';
}

std::string to_string(SolverMethod m) { return m == SolverMethod::DirectLU ? "direct-lu" : "gmres"; }

SolverMethod parse_solver(const std::string& s) {
  if (s == "direct-lu" || s == "direct" || s == "lu") return SolverMethod::DirectLU;
  if (s == "gmres") return SolverMethod::Gmres;
  throw Error("unknown solver '" + s + "'");
}

}  // namespace bkvem
