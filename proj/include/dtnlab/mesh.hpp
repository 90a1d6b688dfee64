#pragma once

#include "dtnlab/common.hpp"

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace dtnlab {

/// Planar triangulation with its boundary extracted from edge incidence.
///
/// Triangles are positively oriented. Each boundary loop is ordered so the
/// mesh lies to its left: the outer loop runs counterclockwise and hole
/// loops run clockwise. `boundary_vertices` is the concatenation of the
/// loops and fixes the ordering of boundary DOFs everywhere in the library.
struct TriangleMesh {
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<std::vector<int>> boundary_loops;
  std::vector<std::array<int, 2>> boundary_edges;
  std::vector<int> boundary_vertices;

  int vertex_count() const { return static_cast<int>(vertices.size()); }
  int triangle_count() const { return static_cast<int>(triangles.size()); }
  int boundary_count() const { return static_cast<int>(boundary_vertices.size()); }

  double signed_area(int t) const;
  double total_area() const;
  double max_edge_length() const;
  /// Shoelace area enclosed by one boundary loop (negative for holes).
  double loop_signed_area(int loop) const;
  /// Euclidean perimeter of all boundary loops.
  double boundary_length() const;
};

enum class Shape { disk, square, annulus };

/// Shape parameters. Disk: centered at the origin with `radius`.
/// Square: [0, side]^2. Annulus: centered at the origin, `inner` < `outer`.
struct ShapeSpec {
  Shape shape = Shape::disk;
  double radius = 1.0;
  double side = 1.0;
  double inner = 0.5;
  double outer = 1.0;

  double diameter() const;
  /// Signed level set: negative inside, zero on the boundary.
  double level_set(const Vec2& x) const;
  /// Area of the exact (curved) domain.
  double exact_area() const;

  static ShapeSpec from_catalog(const CatalogSpec& spec);
};

/// Structured generator: concentric rings for disk/annulus, criss-cross
/// grid for the square. All edges are at most 1.5 h long.
TriangleMesh generate_mesh(const ShapeSpec& shape, double h);

/// Parse ASCII OFF text. Only triangular faces are accepted; a globally
/// clockwise mesh is reversed, any other orientation defect is rejected.
TriangleMesh load_mesh(std::string_view off_text);
std::string write_off(const TriangleMesh& mesh);

/// Rebuild boundary data from `triangles` and check every mesh invariant.
/// Throws ContractError with a diagnostic on the first violation.
void finalize_mesh(TriangleMesh& mesh);

}  // namespace dtnlab
