#include "dtnlab/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>
#include <unordered_map>

namespace dtnlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

std::uint64_t edge_key(int a, int b) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

// Triangulate the band between two closed rings whose points are listed by
// increasing polar angle starting at angle 0, closing each step with the
// shorter of the two candidate diagonals.
void stitch_rings(const std::vector<Vec2>& vertices, const std::vector<int>& inner, const std::vector<int>& outer,
                  std::vector<std::array<int, 3>>& tris) {
  const int n_in = static_cast<int>(inner.size());
  const int n_out = static_cast<int>(outer.size());
  auto dist = [&](int p, int q) { return (vertices[p] - vertices[q]).squaredNorm(); };
  int a = 0, b = 0;
  while (a < n_in || b < n_out) {
    const bool advance_outer =
        b < n_out && (a == n_in || dist(inner[a % n_in], outer[(b + 1) % n_out]) <=
                                       dist(outer[b % n_out], inner[(a + 1) % n_in]));
    if (advance_outer) {
      tris.push_back({inner[a % n_in], outer[b % n_out], outer[(b + 1) % n_out]});
      ++b;
    } else {
      tris.push_back({inner[a % n_in], outer[b % n_out], inner[(a + 1) % n_in]});
      ++a;
    }
  }
}

struct Ring {
  std::vector<int> ids;
};

Ring add_ring(TriangleMesh& mesh, double radius, int count) {
  Ring ring;
  for (int j = 0; j < count; ++j) {
    const double theta = kTwoPi * j / count;
    ring.ids.push_back(mesh.vertex_count());
    mesh.vertices.emplace_back(radius * std::cos(theta), radius * std::sin(theta));
  }
  return ring;
}

TriangleMesh make_disk(double radius, double h) {
  TriangleMesh mesh;
  const int rings = static_cast<int>(std::ceil(radius / h - 1e-12));
  mesh.vertices.emplace_back(0.0, 0.0);
  Ring prev = add_ring(mesh, radius / rings, 6);
  for (int j = 0; j < 6; ++j) mesh.triangles.push_back({0, prev.ids[j], prev.ids[(j + 1) % 6]});
  for (int i = 2; i <= rings; ++i) {
    Ring next = add_ring(mesh, radius * i / rings, 6 * i);
    stitch_rings(mesh.vertices, prev.ids, next.ids, mesh.triangles);
    prev = std::move(next);
  }
  return mesh;
}

TriangleMesh make_annulus(double inner, double outer, double h) {
  const int layers = static_cast<int>(std::ceil((outer - inner) / h - 1e-12));
  const int hole_points = static_cast<int>(std::ceil(kTwoPi * inner / h - 1e-12));
  if (layers < 2 || hole_points < 8) {
    std::ostringstream msg;
    msg << "resolution too coarse to resolve the annulus hole: h=" << h << " gives " << layers
        << " radial layers and " << hole_points << " points on the inner circle"
        << " (need at least 2 and 8)";
    throw ContractError(msg.str());
  }
  TriangleMesh mesh;
  Ring prev;
  for (int k = 0; k <= layers; ++k) {
    const double r = inner + (outer - inner) * k / layers;
    const int count = std::max(8, static_cast<int>(std::ceil(kTwoPi * r / h - 1e-12)));
    Ring next = add_ring(mesh, r, count);
    if (k > 0) stitch_rings(mesh.vertices, prev.ids, next.ids, mesh.triangles);
    prev = std::move(next);
  }
  return mesh;
}

TriangleMesh make_square(double side, double h) {
  TriangleMesh mesh;
  const int n = static_cast<int>(std::ceil(side / h - 1e-12));
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) mesh.vertices.emplace_back(side * i / n, side * j / n);
  auto id = [n](int i, int j) { return j * (n + 1) + i; };
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
      if ((i + j) % 2 == 0) {
        mesh.triangles.push_back({a, b, c});
        mesh.triangles.push_back({a, c, d});
      } else {
        mesh.triangles.push_back({a, b, d});
        mesh.triangles.push_back({b, c, d});
      }
    }
  }
  return mesh;
}

}  // namespace

double TriangleMesh::signed_area(int t) const {
  const auto& tri = triangles[t];
  const Vec2& a = vertices[tri[0]];
  return 0.5 * cross(vertices[tri[1]] - a, vertices[tri[2]] - a);
}

double TriangleMesh::total_area() const {
  double sum = 0.0;
  for (int t = 0; t < triangle_count(); ++t) sum += signed_area(t);
  return sum;
}

double TriangleMesh::max_edge_length() const {
  double longest = 0.0;
  for (const auto& tri : triangles)
    for (int k = 0; k < 3; ++k)
      longest = std::max(longest, (vertices[tri[(k + 1) % 3]] - vertices[tri[k]]).norm());
  return longest;
}

double TriangleMesh::loop_signed_area(int loop) const {
  const auto& ids = boundary_loops[loop];
  double sum = 0.0;
  for (std::size_t k = 0; k < ids.size(); ++k)
    sum += cross(vertices[ids[k]], vertices[ids[(k + 1) % ids.size()]]);
  return 0.5 * sum;
}

double TriangleMesh::boundary_length() const {
  double sum = 0.0;
  for (const auto& e : boundary_edges) sum += (vertices[e[1]] - vertices[e[0]]).norm();
  return sum;
}

double ShapeSpec::diameter() const {
  switch (shape) {
    case Shape::disk: return 2.0 * radius;
    case Shape::square: return std::sqrt(2.0) * side;
    case Shape::annulus: return 2.0 * outer;
  }
  return 0.0;
}

double ShapeSpec::level_set(const Vec2& x) const {
  switch (shape) {
    case Shape::disk: return x.norm() - radius;
    case Shape::square: {
      const double half = 0.5 * side;
      return std::max(std::abs(x.x() - half), std::abs(x.y() - half)) - half;
    }
    case Shape::annulus: {
      const double r = x.norm();
      return std::max(r - outer, inner - r);
    }
  }
  return 0.0;
}

double ShapeSpec::exact_area() const {
  switch (shape) {
    case Shape::disk: return std::numbers::pi * radius * radius;
    case Shape::square: return side * side;
    case Shape::annulus: return std::numbers::pi * (outer * outer - inner * inner);
  }
  return 0.0;
}

ShapeSpec ShapeSpec::from_catalog(const CatalogSpec& spec) {
  ShapeSpec s;
  if (spec.key == "disk") {
    spec.require_only({"radius", "h"});
    s.shape = Shape::disk;
    s.radius = spec.get("radius", 1.0);
    if (!(s.radius > 0)) throw ContractError("disk radius must be positive");
  } else if (spec.key == "square") {
    spec.require_only({"side", "h"});
    s.shape = Shape::square;
    s.side = spec.get("side", 1.0);
    if (!(s.side > 0)) throw ContractError("square side must be positive");
  } else if (spec.key == "annulus") {
    spec.require_only({"inner", "outer", "h"});
    s.shape = Shape::annulus;
    s.inner = spec.get("inner", 0.5);
    s.outer = spec.get("outer", 1.0);
    if (!(s.inner > 0 && s.outer > s.inner)) throw ContractError("annulus needs 0 < inner < outer");
  } else {
    throw ContractError("unknown shape '" + spec.key + "'");
  }
  return s;
}

TriangleMesh generate_mesh(const ShapeSpec& shape, double h) {
  if (!(h > 0.0 && h < 0.5 * shape.diameter())) {
    std::ostringstream msg;
    msg << "mesh resolution h=" << h << " outside (0, " << 0.5 * shape.diameter() << ")";
    throw ContractError(msg.str());
  }
  TriangleMesh mesh;
  switch (shape.shape) {
    case Shape::disk: mesh = make_disk(shape.radius, h); break;
    case Shape::square: mesh = make_square(shape.side, h); break;
    case Shape::annulus: mesh = make_annulus(shape.inner, shape.outer, h); break;
  }
  finalize_mesh(mesh);
  if (mesh.max_edge_length() > 1.5 * h) {
    std::ostringstream msg;
    msg << "generated mesh has an edge of length " << mesh.max_edge_length() << " > 1.5 h";
    throw std::logic_error(msg.str());
  }
  return mesh;
}

void finalize_mesh(TriangleMesh& mesh) {
  const int nv = mesh.vertex_count();
  if (mesh.triangles.empty()) throw ContractError("mesh has no triangles");

  double extent = 0.0;
  for (const auto& v : mesh.vertices) {
    if (!std::isfinite(v.x()) || !std::isfinite(v.y())) throw ContractError("non-finite vertex coordinate");
    extent = std::max({extent, std::abs(v.x()), std::abs(v.y())});
  }
  const double area_floor = 1e-14 * std::max(extent * extent, 1e-300);

  std::vector<int> referenced(nv, 0);
  std::unordered_map<std::uint64_t, int> directed;
  std::map<std::pair<int, int>, int> undirected;
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const auto& tri = mesh.triangles[t];
    for (int k = 0; k < 3; ++k) {
      if (tri[k] < 0 || tri[k] >= nv) {
        throw ContractError("triangle " + std::to_string(t) + " references missing vertex " +
                            std::to_string(tri[k]));
      }
      referenced[tri[k]] = 1;
    }
    if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) {
      throw ContractError("degenerate triangle " + std::to_string(t) + " (repeated vertex)");
    }
    const double area = mesh.signed_area(t);
    if (std::abs(area) <= area_floor) {
      throw ContractError("degenerate triangle " + std::to_string(t) + " (zero area)");
    }
    if (area < 0.0) {
      throw ContractError("inconsistent orientation: triangle " + std::to_string(t) +
                          " is clockwise");
    }
    for (int k = 0; k < 3; ++k) {
      const int a = tri[k], b = tri[(k + 1) % 3];
      if (++undirected[{std::min(a, b), std::max(a, b)}] > 2) {
        throw ContractError("non-manifold edge (" + std::to_string(a) + "," + std::to_string(b) +
                            ") shared by 3 or more faces");
      }
      if (directed.count(edge_key(a, b)) != 0) {
        throw ContractError("inconsistent orientation: edge (" + std::to_string(a) + "," +
                            std::to_string(b) + ") traversed twice in the same direction");
      }
      directed.emplace(edge_key(a, b), t);
    }
  }
  for (int v = 0; v < nv; ++v)
    if (!referenced[v]) throw ContractError("unreferenced vertex " + std::to_string(v));

  // Boundary edges are directed edges without a reverse twin.
  std::vector<int> next(nv, -1);
  int boundary_edge_count = 0;
  for (const auto& tri : mesh.triangles) {
    for (int k = 0; k < 3; ++k) {
      const int a = tri[k], b = tri[(k + 1) % 3];
      if (directed.count(edge_key(b, a)) == 0) {
        if (next[a] != -1) {
          throw ContractError("non-manifold vertex " + std::to_string(a) +
                              " (two boundary loops touch)");
        }
        next[a] = b;
        ++boundary_edge_count;
      }
    }
  }
  if (boundary_edge_count == 0) throw ContractError("mesh has no boundary");

  mesh.boundary_loops.clear();
  mesh.boundary_edges.clear();
  mesh.boundary_vertices.clear();
  std::vector<int> visited(nv, 0);
  for (int start = 0; start < nv; ++start) {
    if (next[start] == -1 || visited[start]) continue;
    std::vector<int> loop;
    int v = start;
    while (!visited[v]) {
      visited[v] = 1;
      loop.push_back(v);
      v = next[v];
      if (v == -1) throw ContractError("open boundary chain at vertex " + std::to_string(loop.back()));
    }
    if (v != start) throw ContractError("boundary chain does not close at vertex " + std::to_string(start));
    mesh.boundary_loops.push_back(std::move(loop));
  }
  for (const auto& loop : mesh.boundary_loops) {
    for (std::size_t k = 0; k < loop.size(); ++k) {
      mesh.boundary_edges.push_back({loop[k], loop[(k + 1) % loop.size()]});
      mesh.boundary_vertices.push_back(loop[k]);
    }
  }

  double loop_area = 0.0;
  for (int l = 0; l < static_cast<int>(mesh.boundary_loops.size()); ++l) loop_area += mesh.loop_signed_area(l);
  const double area = mesh.total_area();
  if (std::abs(loop_area - area) > 1e-10 * std::max(1.0, std::abs(area))) {
    throw ContractError("boundary loops do not enclose the triangulated area");
  }
}

TriangleMesh load_mesh(std::string_view off_text) {
  std::vector<std::string> lines;
  {
    std::istringstream in{std::string(off_text)};
    std::string line;
    while (std::getline(in, line)) {
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      lines.push_back(line);
    }
  }
  std::size_t cursor = 0;
  auto next_line = [&]() -> std::istringstream {
    if (cursor >= lines.size()) throw ContractError("OFF: unexpected end of input");
    return std::istringstream(lines[cursor++]);
  };

  std::string header;
  {
    auto in = next_line();
    in >> header;
    if (header != "OFF") throw ContractError("OFF: missing 'OFF' header");
    // counts may follow the header on the same line
    int probe;
    if (in >> probe) {
      --cursor;
      lines[cursor] = lines[cursor].substr(lines[cursor].find("OFF") + 3);
    }
  }
  int nv = 0, nf = 0, ne = 0;
  {
    auto in = next_line();
    if (!(in >> nv >> nf)) throw ContractError("OFF: malformed counts line");
    in >> ne;
    if (nv <= 0 || nf <= 0) throw ContractError("OFF: empty mesh");
  }
  TriangleMesh mesh;
  mesh.vertices.reserve(nv);
  for (int i = 0; i < nv; ++i) {
    auto in = next_line();
    double x, y;
    if (!(in >> x >> y)) throw ContractError("OFF: malformed vertex line " + std::to_string(i));
    mesh.vertices.emplace_back(x, y);
  }
  mesh.triangles.reserve(nf);
  for (int f = 0; f < nf; ++f) {
    auto in = next_line();
    int count;
    if (!(in >> count)) throw ContractError("OFF: malformed face line " + std::to_string(f));
    if (count != 3) {
      throw ContractError("OFF: non-triangular face " + std::to_string(f) + " with " +
                          std::to_string(count) + " vertices");
    }
    std::array<int, 3> tri;
    if (!(in >> tri[0] >> tri[1] >> tri[2])) {
      throw ContractError("OFF: malformed face line " + std::to_string(f));
    }
    mesh.triangles.push_back(tri);
  }
  if (mesh.total_area() < 0.0) {
    for (auto& tri : mesh.triangles) std::swap(tri[1], tri[2]);
  }
  finalize_mesh(mesh);
  return mesh;
}

std::string write_off(const TriangleMesh& mesh) {
  std::ostringstream out;
  out.precision(17);
  out << "OFF\n" << mesh.vertex_count() << ' ' << mesh.triangle_count() << " 0\n";
  for (const auto& v : mesh.vertices) out << v.x() << ' ' << v.y() << " 0\n";
  for (const auto& t : mesh.triangles) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  return out.str();
}

}  // namespace dtnlab
