#include <algorithm>
#include <map>

#include "bkvem/mesh.hpp"

namespace bkvem {

PolygonalMesh refine(const PolygonalMesh& mesh, const std::vector<int>& marked) {
  std::vector<char> is_marked(mesh.num_cells(), 0);
  for (int c : marked) {
    if (c < 0 || c >= mesh.num_cells()) throw Error("marked cell out of range");
    is_marked[c] = 1;
  }

  std::vector<Point2> verts = mesh.vertices();
  std::vector<int> midpoint(mesh.num_edges(), -1);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    if (!is_marked[c]) continue;
    for (int e : mesh.cell(c).edges) {
      if (midpoint[e] >= 0) continue;
      const Edge& ed = mesh.edge(e);
      midpoint[e] = static_cast<int>(verts.size());
      verts.push_back(0.5 * (mesh.vertex(ed.v[0]) + mesh.vertex(ed.v[1])));
    }
  }

  std::map<std::pair<int, int>, BoundaryLabel> labels;
  auto key = [](int a, int b) { return std::pair<int, int>(std::min(a, b), std::max(a, b)); };
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const Edge& ed = mesh.edge(e);
    if (ed.right >= 0) continue;
    if (midpoint[e] < 0) {
      labels[key(ed.v[0], ed.v[1])] = ed.label;
    } else {
      labels[key(ed.v[0], midpoint[e])] = ed.label;
      labels[key(midpoint[e], ed.v[1])] = ed.label;
    }
  }

  std::vector<std::vector<int>> cells;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const Polygon& p = mesh.cell(c);
    const int n = static_cast<int>(p.vertices.size());
    if (!is_marked[c]) {
      std::vector<int> ids;
      for (int i = 0; i < n; ++i) {
        ids.push_back(p.vertices[i]);
        if (midpoint[p.edges[i]] >= 0) ids.push_back(midpoint[p.edges[i]]);
      }
      cells.push_back(std::move(ids));
      continue;
    }
    const int center = static_cast<int>(verts.size());
    verts.push_back(p.centroid);
    for (int i = 0; i < n; ++i) {
      const int prev_mid = midpoint[p.edges[(i + n - 1) % n]];
      const int next_mid = midpoint[p.edges[i]];
      cells.push_back({center, prev_mid, p.vertices[i], next_mid});
    }
  }

  auto labeler = [&labels](int a, int b) {
    auto it = labels.find({std::min(a, b), std::max(a, b)});
    if (it == labels.end()) throw Error("refine: boundary edge lost its label");
    return it->second;
  };
  return PolygonalMesh::build_indexed(std::move(verts), std::move(cells), labeler);
}

}  // namespace bkvem
