#pragma once

#include <memory>
#include <vector>

#include "bkvem/assembly.hpp"
#include "bkvem/element.hpp"
#include "bkvem/manufactured.hpp"
#include "bkvem/projectors.hpp"
#include "bkvem/spaces.hpp"

namespace bkvem {

struct DiscretizationOptions {
  Family family = Family::Conforming;
  int k = 2;
  int l = 1;
  int gradient_degree = -1;  // k-2 by default, k-1 allowed
  ModelParams params;
  bool allow_out_of_range_params = false;
  bool pressure_dirichlet_everywhere = false;
  int threads = 1;
  int volume_order = -1;  // 2k+2 by default
  int source_order = -1;  // 2k+4 by default
  SolverOptions solver;

  int resolved_volume_order() const { return volume_order > 0 ? volume_order : 2 * k + 2; }
  int resolved_source_order() const { return source_order > 0 ? source_order : 2 * k + 4; }
  void validate() const;
};

// Source terms and boundary data of one solve.
struct ProblemData {
  SourceFn f;  // f~
  SourceFn g;  // g~
  // Exact fields for nonhomogeneous essential and natural boundary data;
  // homogeneous data when null.
  const ExactSolution* boundary = nullptr;
};

ProblemData problem_data(const ManufacturedCase& c);

struct Solution {
  Eigen::VectorXd u;  // global deflection DoFs
  Eigen::VectorXd p;  // global pressure DoFs
};

class Discretization {
 public:
  Discretization(const PolygonalMesh& mesh, const DiscretizationOptions& opts);

  const PolygonalMesh& mesh() const { return *mesh_; }
  const DiscretizationOptions& options() const { return opts_; }
  SpaceKind deflection_space() const { return umap_.space; }
  SpaceKind pressure_space() const { return pmap_.space; }
  const DofMap& deflection_map() const { return umap_; }
  const DofMap& pressure_map() const { return pmap_; }
  int num_dofs() const { return umap_.total + pmap_.total; }

  const ElementGeometry& element(int c) const { return elements_[c]; }
  const DeflectionProjectors& deflection(int c) const { return uproj_[c]; }
  const PressureProjectors& pressure(int c) const { return pproj_[c]; }
  const std::vector<LocalMatrices>& local_matrices() const { return locals_; }

  // Local matrices with loads for the given data, natural boundary terms included.
  std::vector<LocalMatrices> loaded_locals(const ProblemData& data) const;
  // Constraint maps with prescribed values for the given boundary data.
  std::pair<DofMap, DofMap> constrained_maps(const ProblemData& data) const;
  GlobalSystem build_system(const ProblemData& data) const;
  GlobalSystem build_system(const ProblemData& data, const std::vector<LocalMatrices>& locals) const;
  Solution solve(const ProblemData& data, SolveReport* report = nullptr) const;
  Solution split(const Eigen::VectorXd& stacked) const;

  Eigen::VectorXd local_u(const Solution& s, int c) const;
  Eigen::VectorXd local_p(const Solution& s, int c) const;
  Solution interpolate(const ExactSolution& e) const;

 private:
  std::shared_ptr<const PolygonalMesh> mesh_;
  DiscretizationOptions opts_;
  DofMap umap_, pmap_;
  std::vector<ElementGeometry> elements_;
  std::vector<DeflectionProjectors> uproj_;
  std::vector<PressureProjectors> pproj_;
  std::vector<LocalMatrices> locals_;
};

}  // namespace bkvem
