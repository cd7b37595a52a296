#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "bkvem/discretization.hpp"

namespace bkvem {

struct ErrorReport {
  double h = 0.0;
  int ndof = 0;
  double u_l2 = 0.0;  // ||u - Pi_k u_h||
  double u_h2 = 0.0;  // |u - pd_k u_h|_{2,h}
  double p_l2 = 0.0;  // ||p - Pi_l p_h||
  double p_h1 = 0.0;  // |p - pg_l p_h|_{1,h}
  double energy = 0.0;  // sqrt(u_l2^2 + u_h2^2 + beta p_l2^2 + gamma p_h1^2)
  double osc_f = 0.0;   // (sum h^4 ||f~ - Pi_k f~||^2)^(1/2)
  double osc_g = 0.0;   // (sum h^2 ||g~ - Pi_l g~||^2)^(1/2)
};

ErrorReport compute_errors(const Discretization& disc, const Solution& sol, const ManufacturedCase& c);

// r_i = log(e_{i+1}/e_i) / log(h_{i+1}/h_i), reported on row i; the last row
// has no rate (NaN).
std::vector<double> convergence_rates(const std::vector<double>& h, const std::vector<double>& e);

struct RateTable {
  std::vector<double> h;
  std::vector<int> ndof;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> errors;  // per column
  std::vector<std::vector<double>> rates;   // per column
};

RateTable rate_table(const std::vector<ErrorReport>& reports);
void write_csv(const RateTable& t, std::ostream& out);

// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace bkvem
