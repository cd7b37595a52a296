#include "bkvem/config.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace bkvem {

std::string to_string(MeshSource m) {
  switch (m) {
    case MeshSource::Voronoi: return "voronoi";
    case MeshSource::Structured: return "structured";
    case MeshSource::LShape: return "lshape";
    case MeshSource::Files: return "files";
  }
  return "?";
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos == v.size()) return d;
  } catch (const std::exception&) {
  }
  throw Error(key + ": expected a number, got '" + v + "'");
}

int to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long d = std::stol(v, &pos);
    if (pos == v.size()) return static_cast<int>(d);
  } catch (const std::exception&) {
  }
  throw Error(key + ": expected an integer, got '" + v + "'");
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw Error(key + ": expected true or false, got '" + v + "'");
}

std::string num(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

}  // namespace

void set_config_value(RunConfig& c, const std::string& key, const std::string& value) {
  const std::string& v = value;
  if (key == "case") c.case_name = v;
  else if (key == "family") {
    try {
      c.family = parse_family(v);
    } catch (const Error& e) {
      throw Error("family: " + std::string(e.what()));
    }
  } else if (key == "k") c.k = to_int(key, v);
  else if (key == "l") c.l = to_int(key, v);
  else if (key == "alpha") c.params.alpha = to_double(key, v);
  else if (key == "beta") c.params.beta = to_double(key, v);
  else if (key == "gamma") c.params.gamma = to_double(key, v);
  else if (key == "lambda") c.lambda = to_double(key, v);
  else if (key == "mu") c.mu = to_double(key, v);
  else if (key == "c0") c.c0 = to_double(key, v);
  else if (key == "allow_out_of_range_params") c.allow_out_of_range_params = to_bool(key, v);
  else if (key == "mesh") {
    if (v == "voronoi") c.mesh = MeshSource::Voronoi;
    else if (v == "structured") c.mesh = MeshSource::Structured;
    else if (v == "lshape") c.mesh = MeshSource::LShape;
    else if (v == "files") c.mesh = MeshSource::Files;
    else throw Error("mesh: expected voronoi, structured, lshape or files, got '" + v + "'");
  } else if (key == "mesh.cells") c.mesh_cells = to_int(key, v);
  else if (key == "mesh.perturb") c.mesh_perturb = to_double(key, v);
  else if (key == "mesh.lloyd") c.lloyd_iters = to_int(key, v);
  else if (key == "mesh.collapse_ratio") c.collapse_ratio = to_double(key, v);
  else if (key == "mesh.files") {
    c.mesh_files.clear();
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (!item.empty()) c.mesh_files.push_back(item);
    }
  } else if (key == "mesh.format") c.mesh_format = v;
  else if (key == "refinement") {
    if (v == "uniform") c.refinement = RefinementMode::Uniform;
    else if (v == "adaptive") c.refinement = RefinementMode::Adaptive;
    else throw Error("refinement: expected uniform or adaptive, got '" + v + "'");
  } else if (key == "levels") c.levels = to_int(key, v);
  else if (key == "theta") c.theta = to_double(key, v);
  else if (key == "tolerance") c.tolerance = to_double(key, v);
  else if (key == "max_ndof") c.max_ndof = to_int(key, v);
  else if (key == "solver") {
    try {
      c.solver.method = parse_solver(v);
    } catch (const Error& e) {
      throw Error("solver: " + std::string(e.what()));
    }
  } else if (key == "solver.tolerance") c.solver.tolerance = to_double(key, v);
  else if (key == "solver.restart") c.solver.restart = to_int(key, v);
  else if (key == "solver.max_iterations") c.solver.max_iterations = to_int(key, v);
  else if (key == "quadrature.volume_order") c.volume_order = to_int(key, v);
  else if (key == "quadrature.source_order") c.source_order = to_int(key, v);
  else if (key == "gradient_degree") {
    if (v == "k-1") c.gradient_degree = RunConfig::kGradientTop;
    else if (v == "k-2") c.gradient_degree = -1;
    else c.gradient_degree = to_int(key, v);
  } else if (key == "steps") c.steps = to_int(key, v);
  else if (key == "initial") {
    if (v == "zero") c.initial = InitialState::Zero;
    else if (v == "exact") c.initial = InitialState::Exact;
    else throw Error("initial: expected zero or exact, got '" + v + "'");
  } else if (key == "out") c.out = v;
  else if (key == "seed") c.seed = static_cast<unsigned>(to_int(key, v));
  else if (key == "threads") c.threads = to_int(key, v);
  else throw Error(key + ": unknown key");
}

RunConfig parse_config(std::istream& in, const std::string& source) {
  RunConfig c;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error(source + ":" + std::to_string(lineno) + ": expected key = value");
    try {
      set_config_value(c, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const Error& e) {
      throw Error(source + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config '" + path + "'");
  return parse_config(in, path);
}

ModelParams RunConfig::resolved_params() const {
  if (lambda || mu || c0) {
    if (!(lambda && mu && c0)) throw Error("lambda, mu, c0: give all three physical parameters or none");
    return derive_params(*lambda, *mu, *c0, params.alpha);
  }
  return params;
}

void RunConfig::validate() const {
  if (case_name != "ex1" && case_name != "ex2" && case_name != "polynomial")
    throw Error("case: expected ex1, ex2 or polynomial, got '" + case_name + "'");
  if (k < 2 || k > 6) throw Error("k: must lie in 2..6");
  if (l < 1) throw Error("l: must be >= 1");
  if (l > k) throw Error("l: must not exceed k");
  if (family == Family::Nonconforming && k >= 3 && l < k - 2)
    throw Error("l: nonconforming estimator needs l <= k <= l + 2");
  if (gradient_degree < kGradientTop || (gradient_degree >= 0 && gradient_degree != k - 1 && gradient_degree != k - 2))
    throw Error("gradient_degree: must be k-1 or k-2");
  try {
    resolved_params().validate(allow_out_of_range_params);
  } catch (const Error& e) {
    throw Error(std::string("params: ") + e.what());
  }
  if (mesh_cells < 1) throw Error("mesh.cells: must be >= 1");
  if (mesh_perturb < 0.0 || mesh_perturb > 0.3) throw Error("mesh.perturb: must lie in [0, 0.3]");
  if (lloyd_iters < 0) throw Error("mesh.lloyd: must be >= 0");
  if (collapse_ratio < 0.0 || collapse_ratio >= 0.5) throw Error("mesh.collapse_ratio: must lie in [0, 0.5)");
  if (mesh_format != "json" && mesh_format != "text") throw Error("mesh.format: expected json or text");
  if (mesh == MeshSource::Files) {
    if (mesh_files.empty()) throw Error("mesh.files: required when mesh = files");
    for (const auto& f : mesh_files)
      if (!std::filesystem::exists(f)) throw Error("mesh.files: no such file '" + f + "'");
  }
  if (case_name == "ex2" && mesh != MeshSource::LShape && mesh != MeshSource::Files)
    throw Error("mesh: case ex2 lives on the L-shape, use mesh = lshape or files");
  if (case_name != "ex2" && mesh == MeshSource::LShape) throw Error("mesh: lshape meshes need case = ex2");
  if (levels < 1) throw Error("levels: must be >= 1");
  if (!(theta > 0.0 && theta <= 1.0)) throw Error("theta: must lie in (0, 1]");
  if (tolerance < 0.0) throw Error("tolerance: must be >= 0");
  if (max_ndof < 0) throw Error("max_ndof: must be >= 0");
  if (!(solver.tolerance > 0.0)) throw Error("solver.tolerance: must be positive");
  if (solver.restart < 1) throw Error("solver.restart: must be >= 1");
  if (solver.max_iterations < 1) throw Error("solver.max_iterations: must be >= 1");
  if (volume_order == 0 || volume_order < -1) throw Error("quadrature.volume_order: must be positive");
  if (source_order == 0 || source_order < -1) throw Error("quadrature.source_order: must be positive");
  if (steps < 0) throw Error("steps: must be >= 0");
  if (out.empty()) throw Error("out: must not be empty");
  if (threads < 1) throw Error("threads: must be >= 1");
}

DiscretizationOptions RunConfig::discretization(bool pressure_dirichlet_everywhere) const {
  DiscretizationOptions o;
  o.family = family;
  o.k = k;
  o.l = l;
  o.gradient_degree = gradient_degree == kGradientTop ? k - 1 : gradient_degree;
  o.params = resolved_params();
  o.allow_out_of_range_params = allow_out_of_range_params;
  o.pressure_dirichlet_everywhere = pressure_dirichlet_everywhere;
  o.threads = threads;
  o.volume_order = volume_order;
  o.source_order = source_order;
  o.solver = solver;
  return o;
}

std::string dump_config(const RunConfig& c) {
  std::ostringstream s;
  s << "case = " << c.case_name << '\n'
    << "family = " << to_string(c.family) << '\n'
    << "k = " << c.k << '\n'
    << "l = " << c.l << '\n'
    << "alpha = " << num(c.params.alpha) << '\n'
    << "beta = " << num(c.params.beta) << '\n'
    << "gamma = " << num(c.params.gamma) << '\n';
  if (c.lambda) s << "lambda = " << num(*c.lambda) << '\n';
  if (c.mu) s << "mu = " << num(*c.mu) << '\n';
  if (c.c0) s << "c0 = " << num(*c.c0) << '\n';
  s << "allow_out_of_range_params = " << (c.allow_out_of_range_params ? "true" : "false") << '\n'
    << "mesh = " << to_string(c.mesh) << '\n'
    << "mesh.cells = " << c.mesh_cells << '\n'
    << "mesh.perturb = " << num(c.mesh_perturb) << '\n'
    << "mesh.lloyd = " << c.lloyd_iters << '\n'
    << "mesh.collapse_ratio = " << num(c.collapse_ratio) << '\n';
  if (!c.mesh_files.empty()) {
    s << "mesh.files = ";
    for (std::size_t i = 0; i < c.mesh_files.size(); ++i) s << (i ? "," : "") << c.mesh_files[i];
    s << '\n';
  }
  s << "mesh.format = " << c.mesh_format << '\n'
    << "refinement = " << (c.refinement == RefinementMode::Uniform ? "uniform" : "adaptive") << '\n'
    << "levels = " << c.levels << '\n'
    << "theta = " << num(c.theta) << '\n'
    << "tolerance = " << num(c.tolerance) << '\n'
    << "max_ndof = " << c.max_ndof << '\n'
    << "solver = " << to_string(c.solver.method) << '\n'
    << "solver.tolerance = " << num(c.solver.tolerance) << '\n'
    << "solver.restart = " << c.solver.restart << '\n'
    << "solver.max_iterations = " << c.solver.max_iterations << '\n'
    << "quadrature.volume_order = " << c.volume_order << '\n'
    << "quadrature.source_order = " << c.source_order << '\n'
    << "gradient_degree = "
    << (c.gradient_degree == RunConfig::kGradientTop ? "k-1"
        : c.gradient_degree < 0                      ? "k-2"
                                                     : std::to_string(c.gradient_degree))
    << '\n'
    << "steps = " << c.steps << '\n'
    << "initial = " << (c.initial == InitialState::Zero ? "zero" : "exact") << '\n'
    << "out = " << c.out << '\n'
    << "seed = " << c.seed << '\n'
    << "threads = " << c.threads << '\n';
  return s.str();
}

}  // namespace bkvem
