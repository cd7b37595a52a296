#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "bkvem/geometry.hpp"

namespace bkvem {

enum class BoundaryLabel : std::uint8_t { Interior, Clamped, SimplySupported };

std::string to_string(BoundaryLabel label);
BoundaryLabel parse_boundary_label(const std::string& s);

struct Edge {
  std::array<int, 2> v{};  // traversed v[0] -> v[1] by the left cell
  int left = -1;
  int right = -1;          // -1 on the boundary
  BoundaryLabel label = BoundaryLabel::Interior;
  double length = 0.0;
  Point2 normal{};         // outward from the left cell
  Point2 tangent{};        // (v1 - v0) / length
};

struct Polygon {
  std::vector<int> vertices;     // counter-clockwise
  std::vector<int> edges;        // edges[i] joins vertices[i] and vertices[i+1]
  std::vector<int> orientation;  // +1 if edges[i] is traversed v0 -> v1 here
  Point2 centroid{};
  double diameter = 0.0;
  double area = 0.0;
};

// Corners are local vertex indices. Side j starts at local edge side_start[j]
// (the edge leaving corners[j]) and spans side_edges[j] consecutive edges.
struct SideStructure {
  std::vector<int> corners;
  std::vector<int> side_start;
  std::vector<int> side_edges;
  std::vector<bool> is_corner;  // per local vertex
};

SideStructure side_structure(std::span<const Point2> poly, double angle_tol = 1e-8);

// Labels a boundary edge from its endpoints. Must not return Interior.
using BoundaryLabeler = std::function<BoundaryLabel(Point2, Point2)>;

BoundaryLabeler uniform_labeler(BoundaryLabel label);
// Clamped on {x = x_min} and {y = y_min}, simply supported elsewhere.
BoundaryLabeler example1_labeler(double x_min = 0.0, double y_min = 0.0);

struct Rectangle {
  double x_min = 0.0, x_max = 1.0, y_min = 0.0, y_max = 1.0;
};

struct MeshQuality {
  int cells = 0;
  double h = 0.0;
  double min_edge_ratio = 0.0;  // min over cells of min h_e / h_K
  int cells_below_ratio = 0;    // cells with some h_e / h_K < 0.05
  int non_star_cells = 0;       // fan from the centroid not positive
  std::vector<int> ratio_histogram;  // 10 bins over [0, 1] of min h_e / h_K
  std::vector<int> valence_histogram;  // count of cells by vertex count
};

class PolygonalMesh {
 public:
  static PolygonalMesh build(std::vector<Point2> vertices, std::vector<std::vector<int>> cells,
                             const BoundaryLabeler& labeler, double angle_tol = 1e-8);
  // Boundary labels looked up by the vertex ids of each boundary edge.
  static PolygonalMesh build_indexed(std::vector<Point2> vertices,
                                     std::vector<std::vector<int>> cells,
                                     const std::function<BoundaryLabel(int, int)>& labeler,
                                     double angle_tol = 1e-8);

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_cells() const { return static_cast<int>(cells_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }

  const std::vector<Point2>& vertices() const { return vertices_; }
  const Point2& vertex(int i) const { return vertices_[i]; }
  const Polygon& cell(int i) const { return cells_[i]; }
  const std::vector<Polygon>& cells() const { return cells_; }
  const Edge& edge(int i) const { return edges_[i]; }
  const std::vector<Edge>& edges() const { return edges_; }
  const SideStructure& sides(int cell) const { return sides_[cell]; }
  std::vector<Point2> cell_points(int cell) const;

  const std::vector<int>& vertex_cells(int v) const { return vertex_cells_[v]; }
  // Boundary edges touching a vertex (empty for interior vertices).
  const std::vector<int>& vertex_boundary_edges(int v) const { return vertex_boundary_edges_[v]; }
  bool is_boundary_vertex(int v) const { return !vertex_boundary_edges_[v].empty(); }
  // Mean diameter of the cells containing each vertex.
  const std::vector<double>& vertex_lengths() const { return vertex_lengths_; }

  double h() const { return h_; }
  double total_area() const;
  MeshQuality quality() const;
  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  std::vector<Point2> vertices_;
  std::vector<Polygon> cells_;
  std::vector<Edge> edges_;
  std::vector<SideStructure> sides_;
  std::vector<std::vector<int>> vertex_cells_;
  std::vector<std::vector<int>> vertex_boundary_edges_;
  std::vector<double> vertex_lengths_;
  std::vector<std::string> warnings_;
  double h_ = 0.0;
};

PolygonalMesh generate_structured(int nx, int ny, const Rectangle& domain, double perturb,
                                  unsigned seed, const BoundaryLabeler& labeler);

struct VoronoiOptions {
  int lloyd_iters = 50;
  unsigned seed = 1;
  double collapse_ratio = 0.0;  // collapse edges shorter than this fraction of h_K
};
PolygonalMesh generate_voronoi(int n_seeds, const Rectangle& domain, const VoronoiOptions& opts,
                               const BoundaryLabeler& labeler);
PolygonalMesh voronoi_from_seeds(std::vector<Point2> seeds, const Rectangle& domain,
                                 int lloyd_iters, const BoundaryLabeler& labeler,
                                 double collapse_ratio = 0.0);
// (-1,1)^2 minus [0,1) x [-1,0), made of 3 n x n quadrilateral blocks.
PolygonalMesh generate_lshape(int n, double perturb, unsigned seed, const BoundaryLabeler& labeler);

// Splits each marked N-gon into N quadrilaterals through its centroid.
PolygonalMesh refine(const PolygonalMesh& mesh, const std::vector<int>& marked);

enum class MeshFormat { NativeJson, VertexCellText };
PolygonalMesh load_mesh(const std::string& path, MeshFormat format,
                        const BoundaryLabeler& fallback_labeler = {});
void save_mesh_json(const PolygonalMesh& mesh, const std::string& path);

}  // namespace bkvem
