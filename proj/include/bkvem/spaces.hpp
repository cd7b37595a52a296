#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bkvem/mesh.hpp"

namespace bkvem {

enum class Family { Conforming, Nonconforming };
enum class Field { Deflection, Pressure };

std::string to_string(Family f);
Family parse_family(const std::string& s);

struct SpaceKind {
  Field field = Field::Deflection;
  Family family = Family::Conforming;
  int degree = 2;

  static SpaceKind deflection(Family f, int k) { return {Field::Deflection, f, k}; }
  static SpaceKind pressure(Family f, int l) { return {Field::Pressure, f, l}; }
};

// Number of DoFs attached to each mesh entity. Within an edge the normal
// moments come first, then the value moments.
struct EntityDofs {
  int per_vertex = 0;
  int edge_normal = 0;  // moments of the normal derivative
  int edge_value = 0;   // averaged moments of the trace
  int per_cell = 0;
  int per_edge() const { return edge_normal + edge_value; }
};

EntityDofs entity_dofs(SpaceKind space);
int local_dof_count(SpaceKind space, int n_vertices);

enum class DofKind { VertexValue, VertexGradX, VertexGradY, EdgeNormalMoment, EdgeValueMoment, CellMoment };

struct DofDescriptor {
  DofKind kind;
  int entity;    // global vertex, edge or cell id
  int index;     // moment order j or cell monomial index
  double scale;  // h_V, h_e or h_K
};

// Local order: vertex blocks, then edge blocks, then the cell block.
std::vector<DofDescriptor> local_dofs(SpaceKind space, const PolygonalMesh& mesh, int cell);

// Scalar field with derivatives up to second order, used to evaluate DoF
// functionals of exact solutions.
struct ScalarField {
  std::function<double(Point2)> value;
  std::function<Point2(Point2)> gradient;
};

struct DofMap {
  SpaceKind space;
  int total = 0;
  std::vector<std::vector<int>> cell_dofs;
  std::vector<char> constrained;
  std::vector<double> prescribed;

  int num_constrained() const;
  int num_free() const { return total - num_constrained(); }
};

DofMap build_dof_map(const PolygonalMesh& mesh, SpaceKind space);

struct EssentialBc {
  // Pressure is Dirichlet on the whole boundary instead of only on the
  // simply supported part.
  bool pressure_dirichlet_everywhere = false;
  // Exact field for nonhomogeneous data; zero data when empty.
  ScalarField exact;
  int quadrature_order = 10;
};

void apply_essential_bc(DofMap& map, const PolygonalMesh& mesh, const EssentialBc& bc);

// DoF functionals of a smooth field, in global numbering.
Eigen::VectorXd interpolate(const DofMap& map, const PolygonalMesh& mesh, const ScalarField& f,
                            int quadrature_order);

}  // namespace bkvem
