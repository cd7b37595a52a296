#include "bkvem/studies.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "bkvem/csv.hpp"
#include "bkvem/timestep.hpp"

namespace bkvem {

namespace {

ManufacturedCase make_case(const RunConfig& cfg) {
  return builtin_case(cfg.case_name, cfg.resolved_params(), cfg.k, cfg.l, cfg.seed);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::ofstream open_out(const RunConfig& cfg, const std::string& name) {
  std::filesystem::create_directories(cfg.out);
  const auto path = std::filesystem::path(cfg.out) / name;
  std::ofstream f(path);
  if (!f) throw Error("cannot write '" + path.string() + "'");
  return f;
}

void write_common(const RunConfig& cfg, const std::string& command) {
  auto m = open_out(cfg, "manifest.txt");
  write_manifest(cfg, command, m);
}

}  // namespace

PolygonalMesh level_mesh(const RunConfig& cfg, const ManufacturedCase& c, int level) {
  const int scale = 1 << level;
  switch (cfg.mesh) {
    case MeshSource::Voronoi: {
      VoronoiOptions o;
      o.lloyd_iters = cfg.lloyd_iters;
      o.seed = cfg.seed;
      o.collapse_ratio = cfg.collapse_ratio;
      return generate_voronoi(cfg.mesh_cells * scale * scale, Rectangle{}, o, c.labeler);
    }
    case MeshSource::Structured:
      return generate_structured(cfg.mesh_cells * scale, cfg.mesh_cells * scale, Rectangle{}, cfg.mesh_perturb,
                                 cfg.seed, c.labeler);
    case MeshSource::LShape:
      return generate_lshape(cfg.mesh_cells * scale, cfg.mesh_perturb, cfg.seed, c.labeler);
    case MeshSource::Files: {
      if (level >= static_cast<int>(cfg.mesh_files.size())) throw Error("mesh.files: fewer files than levels");
      return load_mesh(cfg.mesh_files[level], cfg.mesh_format == "json" ? MeshFormat::NativeJson
                                                                        : MeshFormat::VertexCellText,
                       c.labeler);
    }
  }
  throw Error("unknown mesh source");
}

PolygonalMesh initial_mesh(const RunConfig& cfg, const ManufacturedCase& c) { return level_mesh(cfg, c, 0); }

ConvergenceResult run_convergence(const RunConfig& cfg, std::ostream* log) {
  cfg.validate();
  const ManufacturedCase c = make_case(cfg);
  const ProblemData data = problem_data(c);
  const DiscretizationOptions opts = cfg.discretization(c.pressure_dirichlet_everywhere);
  const int levels = cfg.mesh == MeshSource::Files ? static_cast<int>(cfg.mesh_files.size()) : cfg.levels;
  ConvergenceResult r;
  std::vector<ErrorReport> reports;
  for (int i = 0; i < levels; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    const PolygonalMesh mesh = level_mesh(cfg, c, i);
    const Discretization disc(mesh, opts);
    const Solution sol = disc.solve(data);
    ConvergenceLevel lv;
    lv.cells = mesh.num_cells();
    lv.errors = compute_errors(disc, sol, c);
    lv.estimator = estimate(disc, sol, data);
    lv.estimator.cells.clear();
    lv.seconds = seconds_since(t0);
    if (log)
      *log << "level " << i << ": cells " << lv.cells << ", ndof " << lv.errors.ndof << ", h " << lv.errors.h
           << ", energy " << lv.errors.energy << ", eta " << lv.estimator.eta << " (" << lv.seconds << " s)\n";
    reports.push_back(lv.errors);
    r.levels.push_back(std::move(lv));
  }
  if (reports.size() >= 2) r.table = rate_table(reports);
  return r;
}

AdaptiveTrace run_adaptive(const RunConfig& cfg, std::ostream* log) {
  cfg.validate();
  const ManufacturedCase c = make_case(cfg);
  MarkingConfig m;
  m.theta = cfg.refinement == RefinementMode::Uniform ? 1.0 : cfg.theta;
  m.max_levels = cfg.levels;
  m.tolerance = cfg.tolerance;
  m.max_ndof = cfg.max_ndof;
  LevelCallback cb;
  if (log)
    cb = [log](const PolygonalMesh&, const Discretization&, const AdaptiveLevel& l) {
      *log << "level " << l.level << ": cells " << l.cells << ", ndof " << l.ndof << ", energy "
           << l.errors.energy << ", eta " << l.estimator.eta << ", marked " << l.marked << '\n';
    };
  return adaptive_loop(initial_mesh(cfg, c), cfg.discretization(c.pressure_dirichlet_everywhere), c, m, cb);
}

std::vector<TimestepRow> run_timestep(const RunConfig& cfg, std::ostream* log) {
  cfg.validate();
  const ManufacturedCase c = make_case(cfg);
  const ProblemData data = problem_data(c);
  const Discretization disc(initial_mesh(cfg, c), cfg.discretization(c.pressure_dirichlet_everywhere));
  Solution start;
  if (cfg.initial == InitialState::Exact) {
    start = disc.interpolate(c.exact);
  } else {
    start.u = Eigen::VectorXd::Zero(disc.deflection_map().total);
    start.p = Eigen::VectorXd::Zero(disc.pressure_map().total);
  }
  std::vector<TimestepRow> rows;
  auto norms = [&](int step, const Solution& s) {
    TimestepRow row;
    row.step = step;
    for (int cell = 0; cell < disc.mesh().num_cells(); ++cell) {
      const ElementGeometry& g = disc.element(cell);
      const DeflectionProjectors& pu = disc.deflection(cell);
      const PressureProjectors& pp = disc.pressure(cell);
      const Eigen::VectorXd u0 = pu.l2 * disc.local_u(s, cell), p0 = pp.l2 * disc.local_p(s, cell);
      const Eigen::VectorXd ue = pu.energy * disc.local_u(s, cell);
      row.u_l2 += u0.dot(mass_matrix(g, cfg.k, cfg.k) * u0);
      row.p_l2 += p0.dot(mass_matrix(g, cfg.l, cfg.l) * p0);
      const QuadratureRule r = polygon_rule(g.vertices, g.centroid, 2 * cfg.k);
      for (std::size_t q = 0; q < r.size(); ++q) {
        const Point2 x = r.points[q];
        const double xx = pu.basis.eval(x, 2, 0).dot(ue), xy = pu.basis.eval(x, 1, 1).dot(ue),
                     yy = pu.basis.eval(x, 0, 2).dot(ue);
        row.u_h2 += r.weights[q] * (xx * xx + 2 * xy * xy + yy * yy);
      }
    }
    row.u_l2 = std::sqrt(row.u_l2);
    row.u_h2 = std::sqrt(row.u_h2);
    row.p_l2 = std::sqrt(row.p_l2);
    if (log) *log << "step " << step << ": |u| " << row.u_l2 << ", |p| " << row.p_l2 << '\n';
    rows.push_back(row);
  };
  norms(0, start);
  timestep_driver(disc, [&](int) { return data; }, start, start, cfg.steps, norms);
  return rows;
}

void write_levels_csv(const ConvergenceResult& r, std::ostream& out) {
  out << "level,cells,ndof,h,energy,eta";
  for (int i = 1; i <= 9; ++i) out << ",eta" << i;
  out << ",efficiency,osc_f,osc_g,seconds\n";
  for (std::size_t i = 0; i < r.levels.size(); ++i) {
    const auto& l = r.levels[i];
    out << i << ',' << l.cells << ',' << l.errors.ndof << ',' << csv_number(l.errors.h) << ','
        << csv_number(l.errors.energy) << ',' << csv_number(l.estimator.eta);
    for (double v : l.estimator.components) out << ',' << csv_number(v);
    out << ',' << csv_number(l.estimator.eta / l.errors.energy) << ',' << csv_number(l.errors.osc_f) << ','
        << csv_number(l.errors.osc_g) << ',' << csv_number(l.seconds) << '\n';
  }
}

void write_timestep_csv(const std::vector<TimestepRow>& rows, std::ostream& out) {
  out << "step,u_l2,u_h2,p_l2\n";
  for (const auto& r : rows)
    out << r.step << ',' << csv_number(r.u_l2) << ',' << csv_number(r.u_h2) << ',' << csv_number(r.p_l2) << '\n';
}

void write_quality_csv(const MeshQuality& q, std::ostream& out) {
  out << "key,value\n";
  out << "cells," << q.cells << "\nh," << csv_number(q.h) << "\nmin_edge_ratio," << csv_number(q.min_edge_ratio)
      << "\ncells_below_0.05," << q.cells_below_ratio << "\nnon_star_cells," << q.non_star_cells << '\n';
  for (std::size_t i = 0; i < q.ratio_histogram.size(); ++i)
    out << "ratio_bin_" << i << ',' << q.ratio_histogram[i] << '\n';
  for (std::size_t i = 0; i < q.valence_histogram.size(); ++i)
    if (q.valence_histogram[i]) out << "valence_" << i << ',' << q.valence_histogram[i] << '\n';
}

void write_manifest(const RunConfig& cfg, const std::string& command, std::ostream& out) {
  out << "# bkvem " << kVersion << '\n' << "# command: " << command << '\n' << "# seed: " << cfg.seed << '\n'
      << dump_config(cfg);
}

int cmd_convergence(const RunConfig& cfg, std::ostream& log) {
  const ConvergenceResult r = run_convergence(cfg, &log);
  write_common(cfg, "convergence");
  {
    auto f = open_out(cfg, "levels.csv");
    write_levels_csv(r, f);
  }
  if (r.levels.size() >= 2) {
    auto f = open_out(cfg, "rates.csv");
    write_csv(r.table, f);
    auto s = open_out(cfg, "summary.txt");
    const std::size_t last = r.table.h.size() - 2;
    for (std::size_t c = 0; c < r.table.columns.size(); ++c)
      s << "final rate " << r.table.columns[c] << ": " << r.table.rates[c][last] << '\n';
    log << "final energy rate " << r.table.rates.back()[last] << '\n';
  }
  return 0;
}

int cmd_adaptive(const RunConfig& cfg, std::ostream& log) {
  const AdaptiveTrace t = run_adaptive(cfg, &log);
  write_common(cfg, "adaptive");
  {
    auto f = open_out(cfg, "trace.csv");
    write_trace_csv(t, f);
  }
  auto s = open_out(cfg, "summary.txt");
  const std::size_t n = t.levels.size();
  if (n >= 2) {
    const std::size_t from = n >= 5 ? n - 5 : 0;
    std::vector<double> nd, e, eta;
    for (std::size_t i = from; i < n; ++i) {
      nd.push_back(t.levels[i].ndof);
      e.push_back(t.levels[i].errors.energy);
      eta.push_back(t.levels[i].estimator.eta);
    }
    const double se = loglog_slope(nd, e), sh = loglog_slope(nd, eta);
    s << "error slope vs ndof (last " << nd.size() << " levels): " << se << '\n'
      << "eta slope vs ndof (last " << nd.size() << " levels): " << sh << '\n';
    log << "error slope " << se << ", eta slope " << sh << '\n';
  }
  if (!t.failure.empty()) {
    s << "failed: " << t.failure << '\n';
    log << "failed: " << t.failure << '\n';
    return 1;
  }
  return 0;
}

int cmd_timestep(const RunConfig& cfg, std::ostream& log) {
  const auto rows = run_timestep(cfg, &log);
  write_common(cfg, "timestep");
  auto f = open_out(cfg, "steps.csv");
  write_timestep_csv(rows, f);
  return 0;
}

int cmd_mesh_info(const RunConfig& cfg, std::ostream& log) {
  cfg.validate();
  const ManufacturedCase c = make_case(cfg);
  const PolygonalMesh m = initial_mesh(cfg, c);
  const MeshQuality q = m.quality();
  write_common(cfg, "mesh-info");
  {
    auto f = open_out(cfg, "mesh_quality.csv");
    write_quality_csv(q, f);
  }
  save_mesh_json(m, (std::filesystem::path(cfg.out) / "mesh.json").string());
  log << "cells " << q.cells << ", vertices " << m.num_vertices() << ", edges " << m.num_edges() << ", h " << q.h
      << ", min h_e/h_K " << q.min_edge_ratio << ", cells below 0.05: " << q.cells_below_ratio
      << ", non-star cells: " << q.non_star_cells << '\n';
  for (const auto& w : m.warnings()) log << "warning: " << w << '\n';
  return 0;
}

}  // namespace bkvem
