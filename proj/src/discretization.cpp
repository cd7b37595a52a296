#include "bkvem/discretization.hpp"

#include "bkvem/parallel.hpp"

namespace bkvem {

void DiscretizationOptions::validate() const {
  if (k < 2) throw Error("k must be >= 2");
  if (l < 1) throw Error("l must be >= 1");
  if (l > k) throw Error("l must not exceed k");
  if (gradient_degree >= 0 && gradient_degree != k - 1 && gradient_degree != k - 2)
    throw Error("gradient degree must be k-1 or k-2");
  if (threads < 1) throw Error("threads must be >= 1");
  params.validate(allow_out_of_range_params);
}

ProblemData problem_data(const ManufacturedCase& c) {
  ProblemData d;
  d.f = [&c](Point2 x) { return c.f_tilde(x); };
  d.g = [&c](Point2 x) { return c.g_tilde(x); };
  d.boundary = &c.exact;
  return d;
}

Discretization::Discretization(const PolygonalMesh& mesh, const DiscretizationOptions& opts)
    : mesh_(std::make_shared<const PolygonalMesh>(mesh)), opts_(opts) {
  opts_.validate();
  const SpaceKind us = SpaceKind::deflection(opts.family, opts.k);
  const SpaceKind ps = SpaceKind::pressure(opts.family, opts.l);
  umap_ = build_dof_map(mesh, us);
  pmap_ = build_dof_map(mesh, ps);
  EssentialBc bc;
  bc.pressure_dirichlet_everywhere = opts.pressure_dirichlet_everywhere;
  apply_essential_bc(umap_, mesh, bc);
  apply_essential_bc(pmap_, mesh, bc);

  ProjectorOptions po;
  po.gradient_degree = opts.gradient_degree;
  po.ritz_degree = opts.l;
  po.low_ritz_degree = opts.k >= 3 && opts.k - 2 <= opts.l ? opts.k - 2 : -1;

  const int n = mesh.num_cells();
  elements_.resize(n);
  uproj_.resize(n);
  pproj_.resize(n);
  locals_.resize(n);
  const int order = opts_.resolved_volume_order();
  parallel_for(n, opts.threads, [&](int c) {
    elements_[c] = make_element(*mesh_, c, order);
    uproj_[c] = compute_deflection_projectors(elements_[c], us, po);
    pproj_[c] = compute_pressure_projectors(elements_[c], ps, po);
    locals_[c] = local_forms(elements_[c], uproj_[c], pproj_[c], opts_.params);
  });
}

std::vector<LocalMatrices> Discretization::loaded_locals(const ProblemData& data) const {
  std::vector<LocalMatrices> out = locals_;
  const int order = opts_.resolved_source_order();
  const ModelParams& prm = opts_.params;
  parallel_for(mesh_->num_cells(), opts_.threads, [&](int c) {
    const ElementGeometry& g = elements_[c];
    const DeflectionProjectors& pu = uproj_[c];
    const PressureProjectors& pp = pproj_[c];
    out[c].f = local_rhs(g, pu.basis, pu.l2, data.f, order);
    out[c].g = local_rhs(g, pp.basis, pp.l2, data.g, order);
    if (!data.boundary) return;
    const ExactSolution& ex = *data.boundary;
    const LineRule lr = line_rule(order);
    for (std::size_t i = 0; i < g.edges.size(); ++i) {
      const ElementEdge& e = g.edges[i];
      if (e.label == BoundaryLabel::Interior) continue;
      for (std::size_t q = 0; q < lr.xi.size(); ++q) {
        const Point2 x = e.point(lr.xi[q]);
        const double w = e.length * lr.weights[q];
        if (e.label == BoundaryLabel::SimplySupported) {
          // bending moment d_nn u enters naturally
          const Hessian hs = ex.hess_u(x);
          const double dnn = hs[0] * e.n.x * e.n.x + 2 * hs[1] * e.n.x * e.n.y + hs[2] * e.n.y * e.n.y;
          out[c].f += (w * dnn) * trace_row(pu.traces[i].normal, lr.xi[q]).transpose();
        } else if (!opts_.pressure_dirichlet_everywhere) {
          // flux alpha d_n u + gamma d_n p enters naturally
          const double flux = prm.alpha * dot(ex.grad_u(x), e.n) + prm.gamma * dot(ex.grad_p(x), e.n);
          out[c].g += (w * flux) * trace_row(pp.traces[i].value, lr.xi[q]).transpose();
        }
      }
    }
  });
  return out;
}

std::pair<DofMap, DofMap> Discretization::constrained_maps(const ProblemData& data) const {
  DofMap um = umap_, pm = pmap_;
  if (data.boundary) {
    EssentialBc bc;
    bc.pressure_dirichlet_everywhere = opts_.pressure_dirichlet_everywhere;
    bc.quadrature_order = opts_.resolved_source_order();
    bc.exact = data.boundary->deflection_field();
    apply_essential_bc(um, *mesh_, bc);
    bc.exact = data.boundary->pressure_field();
    apply_essential_bc(pm, *mesh_, bc);
  }
  return {std::move(um), std::move(pm)};
}

GlobalSystem Discretization::build_system(const ProblemData& data) const {
  return build_system(data, loaded_locals(data));
}

GlobalSystem Discretization::build_system(const ProblemData& data, const std::vector<LocalMatrices>& locals) const {
  const auto [um, pm] = constrained_maps(data);
  return assemble(um, pm, locals);
}

Solution Discretization::split(const Eigen::VectorXd& x) const {
  return {x.head(umap_.total), x.tail(pmap_.total)};
}

Solution Discretization::solve(const ProblemData& data, SolveReport* report) const {
  const GlobalSystem sys = build_system(data);
  return split(bkvem::solve(sys, opts_.solver, report));
}

Eigen::VectorXd Discretization::local_u(const Solution& s, int c) const {
  const auto& d = umap_.cell_dofs[c];
  Eigen::VectorXd v(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) v[i] = s.u[d[i]];
  return v;
}

Eigen::VectorXd Discretization::local_p(const Solution& s, int c) const {
  const auto& d = pmap_.cell_dofs[c];
  Eigen::VectorXd v(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) v[i] = s.p[d[i]];
  return v;
}

Solution Discretization::interpolate(const ExactSolution& e) const {
  const int order = opts_.resolved_source_order();
  return {bkvem::interpolate(umap_, *mesh_, e.deflection_field(), order),
          bkvem::interpolate(pmap_, *mesh_, e.pressure_field(), order)};
}

}  // namespace bkvem
