#pragma once

#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "bkvem/errors.hpp"
#include "bkvem/estimator.hpp"

namespace bkvem {

struct MarkingConfig {
  double theta = 0.5;
  int max_levels = 8;      // number of solves
  double tolerance = 0.0;  // stop once eta <= tolerance
  int max_ndof = 0;        // stop before solving above this size; 0 means no cap

  void validate() const;
};

// Shortest prefix of the cells sorted by eta_K^2 (descending, ties by id)
// carrying theta of the total. Returned in that order.
std::vector<int> dorfler_mark(const std::vector<double>& eta2, double theta);
std::vector<int> dorfler_mark(const std::vector<LocalEstimators>& locals, double theta);

struct AdaptiveLevel {
  int level = 0;
  int cells = 0;
  int ndof = 0;
  double h = 0.0;
  bool has_errors = false;
  ErrorReport errors;
  EstimatorResult estimator;  // cells dropped after the level is recorded
  int marked = 0;
};

struct AdaptiveTrace {
  std::vector<AdaptiveLevel> levels;
  std::string failure;  // empty unless a level aborted
};

using LevelCallback = std::function<void(const PolygonalMesh&, const Discretization&, const AdaptiveLevel&)>;

// SOLVE -> ESTIMATE -> MARK -> REFINE, starting from `mesh`. Errors against
// the exact solution of `c` are recorded on every level.
AdaptiveTrace adaptive_loop(const PolygonalMesh& mesh, const DiscretizationOptions& opts, const ManufacturedCase& c,
                            const MarkingConfig& marking, const LevelCallback& on_level = {});

void write_trace_csv(const AdaptiveTrace& t, std::ostream& out);

}  // namespace bkvem
