#pragma once

#include <functional>
#include <vector>

#include "bkvem/discretization.hpp"

namespace bkvem {

// Data of step n (n >= 1): f^n, g^n and boundary values.
using StepData = std::function<ProblemData(int step)>;

// Local loads (2 u^n - u^{n-1}, Pi_k v) and (p^n, Pi_l q) added to f^{n+1}, g^{n+1}.
std::vector<LocalMatrices> history_locals(const Discretization& disc, const ProblemData& data, const Solution& current,
                                          const Solution& previous);

using StepCallback = std::function<void(int step, const Solution&)>;

// Backward Euler with unit step. `current` holds u^0 and p^0, `previous`
// holds u^{-1} (its pressure part is ignored). Returns u^1..u^N.
std::vector<Solution> timestep_driver(const Discretization& disc, const StepData& data, Solution current,
                                      Solution previous, int steps, const StepCallback& on_step = {});

}  // namespace bkvem
