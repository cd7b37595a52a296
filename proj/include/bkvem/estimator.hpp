#pragma once

#include <array>
#include <vector>

#include "bkvem/discretization.hpp"

namespace bkvem {

// Squared contributions eta_1^2 ... eta_9^2 of one element.
struct LocalEstimators {
  std::array<double, 9> eta2{};
  double total() const;
};

struct EstimatorResult {
  std::vector<LocalEstimators> cells;
  std::array<double, 9> components{};  // sqrt of the summed squares per term
  double eta = 0.0;
};

// Edge terms are charged in full to every element sharing the edge. Boundary
// jumps are measured against the exact boundary data of `data` (zero when
// absent). Conforming runs use eta_1..eta_7; nonconforming runs add eta_8,
// and eta_9 for k >= 3.
EstimatorResult estimate(const Discretization& disc, const Solution& sol, const ProblemData& data);

EstimatorResult global_eta(std::vector<LocalEstimators> cells);

}  // namespace bkvem
