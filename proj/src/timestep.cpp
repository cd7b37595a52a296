#include "bkvem/timestep.hpp"

#include "bkvem/parallel.hpp"

namespace bkvem {

std::vector<LocalMatrices> history_locals(const Discretization& disc, const ProblemData& data, const Solution& current,
                                          const Solution& previous) {
  std::vector<LocalMatrices> locals = disc.loaded_locals(data);
  const int n = disc.mesh().num_cells();
  const int k = disc.options().k, l = disc.options().l;
  parallel_for(n, disc.options().threads, [&](int c) {
    const ElementGeometry& g = disc.element(c);
    const DeflectionProjectors& pu = disc.deflection(c);
    const PressureProjectors& pp = disc.pressure(c);
    const Eigen::VectorXd du = 2.0 * disc.local_u(current, c) - disc.local_u(previous, c);
    const Eigen::VectorXd pu_poly = pu.l2 * du;
    const Eigen::VectorXd pp_poly = pp.l2 * disc.local_p(current, c);
    locals[c].f += pu.l2.transpose() * (mass_matrix(g, k, k) * pu_poly);
    locals[c].g += pp.l2.transpose() * (mass_matrix(g, l, l) * pp_poly);
  });
  return locals;
}

std::vector<Solution> timestep_driver(const Discretization& disc, const StepData& data, Solution current,
                                      Solution previous, int steps, const StepCallback& on_step) {
  if (steps < 0) throw Error("number of steps must be >= 0");
  if (current.u.size() != disc.deflection_map().total || current.p.size() != disc.pressure_map().total ||
      previous.u.size() != disc.deflection_map().total)
    throw Error("initial state does not match the discretization");
  if (previous.p.size() != current.p.size()) previous.p = Eigen::VectorXd::Zero(current.p.size());
  std::vector<Solution> out;
  out.reserve(steps);
  for (int n = 1; n <= steps; ++n) {
    const ProblemData d = data(n);
    const std::vector<LocalMatrices> locals = history_locals(disc, d, current, previous);
    const GlobalSystem sys = disc.build_system(d, locals);
    Solution next = disc.split(solve(sys, disc.options().solver));
    if (on_step) on_step(n, next);
    previous = std::move(current);
    current = next;
    out.push_back(std::move(next));
  }
  return out;
}

}  // namespace bkvem
