#include <fstream>
#include <limits>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "bkvem/mesh.hpp"

namespace bkvem {

namespace {

struct BoundaryRule {
  bool by_edge = false;
  int a = -1, b = -1;
  Rectangle box;
  BoundaryLabel label = BoundaryLabel::Clamped;
};

PolygonalMesh load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open mesh file " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const std::exception& e) {
    throw Error("mesh parse failure in " + path + ": " + e.what());
  }
  try {
    std::vector<Point2> verts;
    for (const auto& v : doc.at("vertices")) verts.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
    std::vector<std::vector<int>> cells;
    for (const auto& c : doc.at("cells")) cells.push_back(c.get<std::vector<int>>());

    std::vector<BoundaryRule> rules;
    if (doc.contains("boundary")) {
      for (const auto& r : doc.at("boundary")) {
        BoundaryRule rule;
        rule.label = parse_boundary_label(r.at("label").get<std::string>());
        if (r.contains("edge")) {
          rule.by_edge = true;
          rule.a = r.at("edge").at(0).get<int>();
          rule.b = r.at("edge").at(1).get<int>();
        } else {
          const auto& box = r.at("region");
          const double inf = std::numeric_limits<double>::infinity();
          rule.box = {box.value("x_min", -inf), box.value("x_max", inf), box.value("y_min", -inf),
                      box.value("y_max", inf)};
        }
        rules.push_back(rule);
      }
    }
    std::optional<BoundaryLabel> fallback;
    if (doc.contains("default_label")) fallback = parse_boundary_label(doc.at("default_label").get<std::string>());

    const std::vector<Point2> pts = verts;
    auto labeler = [&](int a, int b) {
      const double tol = 1e-12;
      auto in_box = [&](const Rectangle& r, Point2 p) {
        return p.x >= r.x_min - tol && p.x <= r.x_max + tol && p.y >= r.y_min - tol && p.y <= r.y_max + tol;
      };
      for (const auto& r : rules) {
        if (r.by_edge) {
          if ((r.a == a && r.b == b) || (r.a == b && r.b == a)) return r.label;
        } else if (in_box(r.box, pts[a]) && in_box(r.box, pts[b])) {
          return r.label;
        }
      }
      if (fallback) return *fallback;
      throw Error("unlabeled boundary edge (" + std::to_string(a) + ", " + std::to_string(b) + ")");
    };
    return PolygonalMesh::build_indexed(std::move(verts), std::move(cells), labeler);
  } catch (const nlohmann::json::exception& e) {
    throw Error("mesh parse failure in " + path + ": " + e.what());
  }
}

PolygonalMesh load_text(const std::string& path, const BoundaryLabeler& labeler) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open mesh file " + path);
  std::stringstream body;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    body << line << '\n';
  }
  int nv = 0, nc = 0, base = 0;
  if (!(body >> nv >> nc)) throw Error("mesh parse failure in " + path + ": missing header");
  {
    // optional index base on the header line
    std::string rest;
    std::getline(body, rest);
    std::istringstream hs(rest);
    hs >> base;
  }
  std::vector<Point2> verts(nv);
  for (auto& p : verts)
    if (!(body >> p.x >> p.y)) throw Error("mesh parse failure in " + path + ": bad vertex line");
  std::vector<std::vector<int>> cells(nc);
  for (auto& c : cells) {
    int n = 0;
    if (!(body >> n) || n < 3) throw Error("mesh parse failure in " + path + ": bad cell line");
    c.resize(n);
    for (int& v : c) {
      if (!(body >> v)) throw Error("mesh parse failure in " + path + ": bad cell line");
      v -= base;
    }
  }
  if (!labeler) throw Error("vertex-cell text mesh needs a boundary labeler");
  return PolygonalMesh::build(std::move(verts), std::move(cells), labeler);
}

}  // namespace

PolygonalMesh load_mesh(const std::string& path, MeshFormat format, const BoundaryLabeler& labeler) {
  if (format == MeshFormat::NativeJson) return load_json(path);
  return load_text(path, labeler);
}

void save_mesh_json(const PolygonalMesh& mesh, const std::string& path) {
  nlohmann::json doc;
  doc["vertices"] = nlohmann::json::array();
  for (const Point2& p : mesh.vertices()) doc["vertices"].push_back({p.x, p.y});
  doc["cells"] = nlohmann::json::array();
  for (const Polygon& c : mesh.cells()) doc["cells"].push_back(c.vertices);
  doc["boundary"] = nlohmann::json::array();
  for (const Edge& e : mesh.edges())
    if (e.right < 0) doc["boundary"].push_back({{"edge", {e.v[0], e.v[1]}}, {"label", to_string(e.label)}});
  std::ofstream out(path);
  if (!out) throw Error("cannot write mesh file " + path);
  out << doc.dump(1) << '\n';
}

}  // namespace bkvem
