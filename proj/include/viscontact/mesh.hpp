#pragma once

#include <string>
#include <vector>

#include "viscontact/types.hpp"

namespace viscontact {

enum class EdgeTag { Fixed, Traction, ContactA, ContactB, Free };

const char* to_string(EdgeTag tag);

struct BoundaryEdge {
  int a = -1;
  int b = -1;
  EdgeTag tag = EdgeTag::Free;
};

/// Triangulated 2D domain with tagged boundary edges. Triangles are stored
/// counterclockwise; values are immutable once built and safe to share.
struct Mesh2D {
  Eigen::Matrix2Xd nodes;      // column = (x1, x2)
  Eigen::Matrix3Xi triangles;  // column = vertex indices, CCW
  std::vector<BoundaryEdge> boundary_edges;

  int node_count() const { return static_cast<int>(nodes.cols()); }
  int triangle_count() const { return static_cast<int>(triangles.cols()); }

  double triangle_area(int t) const;
  double total_area() const;
  /// Bounding-box diagonal; reference scale for tolerances.
  double diameter() const;
};

/// Rectangle [0,w]x[0,h] on a structured grid of `resolution` cells along x
/// (cells kept near square), split into CCW triangle pairs. Bottom edge
/// FIXED, top TRACTION, sides FREE.
Mesh2D build_rectangle(double width, double height, int resolution);

/// Rectangle with a horizontal interior slit: grid nodes strictly between
/// the slit ends are duplicated, the upper copies lifted by `initial_gap`
/// and sewn to the triangles above. Upper lip tagged CONTACT_A, lower lip
/// CONTACT_B; slit ends stay single nodes. Slit coordinates snap to the
/// grid; the gap must stay below one cell height.
Mesh2D build_notched_rectangle(double width, double height, double slit_x0,
                               double slit_x1, double slit_y,
                               double initial_gap, int resolution);

/// Parses the ASCII mesh format (sections NODES/TRIANGLES/EDGES, `#`
/// comments, 0-based indices). Negatively oriented triangles are fixed by a
/// vertex swap and reported through `warnings`. Throws ParseError on bad
/// syntax and Error on invariant violations.
Mesh2D load_mesh(const std::string& text, std::vector<std::string>* warnings = nullptr);

/// Inverse of load_mesh; load_mesh(write_mesh(m)) reproduces m exactly.
std::string write_mesh(const Mesh2D& mesh);

struct MeshCheck {
  std::string name;
  bool pass = true;
  std::string detail;
};

struct MeshReport {
  std::vector<MeshCheck> checks;
  std::vector<MeshCheck> warnings;
  bool all_pass() const;
  std::string summary() const;
};

/// Non-throwing invariant sweep: positive areas, nonempty fixed boundary,
/// tags partitioning the boundary, plus duplicate-coordinate warnings.
MeshReport validate(const Mesh2D& mesh);

/// One node-to-node non-penetration constraint: (u_a - u_b)·normal <= gap.
struct ContactPair {
  int node_a = -1;   // on the CONTACT_A lip
  int node_b = -1;   // on the CONTACT_B lip
  Vec2 normal;       // unit, points from a toward b
  double gap = 0.0;  // initial separation, >= 0
};

struct ConstraintSet {
  std::vector<ContactPair> pairs;
  int count() const { return static_cast<int>(pairs.size()); }
};

/// Pairs every CONTACT_A node with the unique CONTACT_B node sharing its x1
/// coordinate within `tol` (tol <= 0 picks 1e-9 * diameter). Nodes touching
/// both lips (slit ends) carry no constraint. Gap and normal come from the
/// node positions. Throws on orphans and ambiguous matches.
ConstraintSet match_contact_pairs(const Mesh2D& mesh, double tol = 0.0);

}  // namespace viscontact
