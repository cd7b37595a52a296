#pragma once

#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bkvem/adaptivity.hpp"
#include "bkvem/discretization.hpp"

namespace bkvem {

enum class MeshSource { Voronoi, Structured, LShape, Files };
enum class RefinementMode { Uniform, Adaptive };
enum class InitialState { Zero, Exact };

std::string to_string(MeshSource m);

struct RunConfig {
  std::string case_name = "ex1";
  Family family = Family::Conforming;
  int k = 2;
  int l = 1;
  ModelParams params;
  // Physical parameters; when lambda, mu, c0 are all given, beta and gamma
  // are derived from them.
  std::optional<double> lambda, mu, c0;
  bool allow_out_of_range_params = false;

  MeshSource mesh = MeshSource::Voronoi;
  int mesh_cells = 25;        // coarsest mesh: seeds, or cells per side for grids
  double mesh_perturb = 0.0;  // grids only
  int lloyd_iters = 50;
  double collapse_ratio = 0.0;
  std::vector<std::string> mesh_files;
  std::string mesh_format = "json";  // json | text

  RefinementMode refinement = RefinementMode::Uniform;
  int levels = 5;
  double theta = 0.5;
  double tolerance = 0.0;
  int max_ndof = 0;

  SolverOptions solver;
  int volume_order = -1;
  int source_order = -1;
  // -1: k-2 (default); kGradientTop: k-1 whatever k ends up being
  static constexpr int kGradientTop = -2;
  int gradient_degree = -1;

  int steps = 1;
  InitialState initial = InitialState::Zero;

  std::string out = "out";
  unsigned seed = 1;
  int threads = 1;

  // Throws Error("<key>: <reason>") naming the offending field.
  void validate() const;
  DiscretizationOptions discretization(bool pressure_dirichlet_everywhere) const;
  ModelParams resolved_params() const;
};

// "key = value" lines; '#' starts a comment. Unknown keys are errors.
RunConfig parse_config(std::istream& in, const std::string& source = "config");
RunConfig load_config(const std::string& path);

// Set a single key, as from a file line or a command-line override.
void set_config_value(RunConfig& c, const std::string& key, const std::string& value);

// Normalized key = value echo, readable back by parse_config.
std::string dump_config(const RunConfig& c);

}  // namespace bkvem
