#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "bkvem/projectors.hpp"

namespace bkvem {

struct ModelParams {
  double alpha = 1.0;
  double beta = 1.0;
  double gamma = 1.0;

  // Throws unless 0 < alpha <= 1 and beta, gamma >= 1, or allow_out_of_range.
  void validate(bool allow_out_of_range = false) const;
};

ModelParams derive_params(double lambda, double mu, double c0, double alpha);

struct LocalMatrices {
  Eigen::MatrixXd a1;  // deflection x deflection
  Eigen::MatrixXd b;   // deflection x pressure, realizes a2(p, v)
  Eigen::MatrixXd a3;  // pressure x pressure
  Eigen::VectorXd f;
  Eigen::VectorXd g;
};

// Stabilizations in dofi-dofi form, each applied to (I - D P).
Eigen::MatrixXd dofi_dofi(const Eigen::MatrixXd& dof_matrix, const Eigen::MatrixXd& projection, double scale);

// The four terms of a1 separately, for testing.
struct DeflectionFormTerms {
  Eigen::MatrixXd l2, l2_stab, hessian, hessian_stab;
};
DeflectionFormTerms deflection_form_terms(const ElementGeometry& g, const DeflectionProjectors& p);

LocalMatrices local_forms(const ElementGeometry& g, const DeflectionProjectors& pu,
                          const PressureProjectors& pp, const ModelParams& params);

using SourceFn = std::function<double(Point2)>;

// Moments int_K f m_a of a source against the projector basis, then
// (f, Pi v) for every local basis function.
Eigen::VectorXd local_rhs(const ElementGeometry& g, const ScaledMonomialBasis& basis,
                          const Eigen::MatrixXd& l2, const SourceFn& f, int order);

struct GlobalSystem {
  Eigen::SparseMatrix<double> matrix;   // free x free
  Eigen::VectorXd rhs;                  // free
  std::vector<int> free_to_global;      // in the stacked [u; p] numbering
  std::vector<int> global_to_free;      // -1 for constrained
  Eigen::VectorXd prescribed;           // stacked, zero on free entries
  int n_u = 0;
  int n_p = 0;
};

GlobalSystem assemble(const DofMap& umap, const DofMap& pmap, const std::vector<LocalMatrices>& locals);

enum class SolverMethod { DirectLU, Gmres };

struct SolverOptions {
  SolverMethod method = SolverMethod::DirectLU;
  int restart = 50;
  double tolerance = 1e-12;
  int max_iterations = 5000;
};

struct SolveReport {
  double relative_residual = 0.0;
  int iterations = 0;
};

// Returns the stacked [u; p] vector including prescribed values.
Eigen::VectorXd solve(const GlobalSystem& sys, const SolverOptions& opts = {}, SolveReport* report = nullptr);

// Full (unreduced) stacked matrix for diagnostics and export.
Eigen::SparseMatrix<double> assemble_full(const DofMap& umap, const DofMap& pmap,
                                          const std::vector<LocalMatrices>& locals);
void write_matrix_market(const Eigen::SparseMatrix<double>& m, const std::string& path);

std::string to_string(SolverMethod m);
SolverMethod parse_solver(const std::string& s);

}  // namespace bkvem
