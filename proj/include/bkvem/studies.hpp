#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "bkvem/adaptivity.hpp"
#include "bkvem/config.hpp"
#include "bkvem/errors.hpp"

namespace bkvem {

inline constexpr const char* kVersion = "0.1.0";

// Coarsest mesh of the configured source.
PolygonalMesh initial_mesh(const RunConfig& cfg, const ManufacturedCase& c);
// Mesh of uniform level i: Voronoi seeds grow 4x per level, grids double the
// cells per side, file lists are taken in order.
PolygonalMesh level_mesh(const RunConfig& cfg, const ManufacturedCase& c, int level);

struct ConvergenceLevel {
  int cells = 0;
  ErrorReport errors;
  EstimatorResult estimator;  // without per-cell data
  double seconds = 0.0;
};

struct ConvergenceResult {
  std::vector<ConvergenceLevel> levels;
  RateTable table;
};

// Solves the configured case on the uniform sequence. Writes nothing.
ConvergenceResult run_convergence(const RunConfig& cfg, std::ostream* log = nullptr);
AdaptiveTrace run_adaptive(const RunConfig& cfg, std::ostream* log = nullptr);

struct TimestepRow {
  int step = 0;
  double u_l2 = 0.0;  // ||Pi_k u_h||
  double u_h2 = 0.0;  // |pd_k u_h|_{2,h}
  double p_l2 = 0.0;  // ||Pi_l p_h||
};

// Static data of the configured case at every step.
std::vector<TimestepRow> run_timestep(const RunConfig& cfg, std::ostream* log = nullptr);

void write_levels_csv(const ConvergenceResult& r, std::ostream& out);
void write_timestep_csv(const std::vector<TimestepRow>& rows, std::ostream& out);
void write_quality_csv(const MeshQuality& q, std::ostream& out);
void write_manifest(const RunConfig& cfg, const std::string& command, std::ostream& out);

// Command runners used by the CLI: run, write CSVs + summary + manifest under
// cfg.out, return the exit status.
int cmd_convergence(const RunConfig& cfg, std::ostream& log);
int cmd_adaptive(const RunConfig& cfg, std::ostream& log);
int cmd_timestep(const RunConfig& cfg, std::ostream& log);
int cmd_mesh_info(const RunConfig& cfg, std::ostream& log);

}  // namespace bkvem
