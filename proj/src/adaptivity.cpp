#include "bkvem/adaptivity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bkvem/csv.hpp"

namespace bkvem {

void MarkingConfig::validate() const {
  if (!(theta > 0.0 && theta <= 1.0)) throw Error("theta must lie in (0, 1]");
  if (max_levels < 1) throw Error("max_levels must be >= 1");
  if (tolerance < 0.0) throw Error("tolerance must be >= 0");
  if (max_ndof < 0) throw Error("max_ndof must be >= 0");
}

std::vector<int> dorfler_mark(const std::vector<double>& eta2, double theta) {
  if (eta2.empty()) throw Error("dorfler_mark: empty estimator list");
  if (!(theta > 0.0 && theta <= 1.0)) throw Error("theta must lie in (0, 1]");
  std::vector<int> order(eta2.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return eta2[a] > eta2[b]; });
  const double total = std::accumulate(eta2.begin(), eta2.end(), 0.0);
  if (theta == 1.0) return order;
  const double target = theta * total;
  double acc = 0.0;
  std::size_t n = 0;
  while (n < order.size() && acc < target) acc += eta2[order[n++]];
  if (n == 0) n = 1;  // zero estimator: still refine something
  order.resize(n);
  return order;
}

std::vector<int> dorfler_mark(const std::vector<LocalEstimators>& locals, double theta) {
  std::vector<double> e(locals.size());
  for (std::size_t i = 0; i < locals.size(); ++i) e[i] = locals[i].total();
  return dorfler_mark(e, theta);
}

AdaptiveTrace adaptive_loop(const PolygonalMesh& start, const DiscretizationOptions& opts, const ManufacturedCase& c,
                            const MarkingConfig& marking, const LevelCallback& on_level) {
  marking.validate();
  AdaptiveTrace trace;
  PolygonalMesh mesh = start;
  const ProblemData data = problem_data(c);
  for (int level = 0; level < marking.max_levels; ++level) {
    AdaptiveLevel rec;
    rec.level = level;
    std::vector<int> marked;
    try {
      Discretization disc(mesh, opts);
      if (marking.max_ndof > 0 && disc.num_dofs() > marking.max_ndof) break;
      const Solution sol = disc.solve(data);
      rec.cells = mesh.num_cells();
      rec.ndof = disc.num_dofs();
      rec.h = mesh.h();
      rec.errors = compute_errors(disc, sol, c);
      rec.has_errors = true;
      rec.estimator = estimate(disc, sol, data);
      const bool last = level + 1 == marking.max_levels || rec.estimator.eta <= marking.tolerance;
      if (!last) {
        marked = dorfler_mark(rec.estimator.cells, marking.theta);
        rec.marked = static_cast<int>(marked.size());
      }
      if (on_level) on_level(mesh, disc, rec);
      rec.estimator.cells.clear();
      trace.levels.push_back(std::move(rec));
      if (last) break;
      mesh = refine(mesh, marked);
    } catch (const std::exception& e) {
      trace.failure = "level " + std::to_string(level) + ": " + e.what();
      break;
    }
  }
  return trace;
}

void write_trace_csv(const AdaptiveTrace& t, std::ostream& out) {
  out << "level,cells,ndof,h,u_l2,u_h2,p_l2,p_h1,energy,eta";
  for (int i = 1; i <= 9; ++i) out << ",eta" << i;
  out << ",marked\n";
  for (const auto& l : t.levels) {
    out << l.level << ',' << l.cells << ',' << l.ndof << ',' << csv_number(l.h) << ',' << csv_number(l.errors.u_l2)
        << ',' << csv_number(l.errors.u_h2) << ',' << csv_number(l.errors.p_l2) << ','
        << csv_number(l.errors.p_h1) << ',' << csv_number(l.errors.energy) << ',' << csv_number(l.estimator.eta);
    for (double v : l.estimator.components) out << ',' << csv_number(v);
    out << ',' << l.marked << '\n';
  }
}

}  // namespace bkvem
