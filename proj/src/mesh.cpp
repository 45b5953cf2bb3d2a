#include "viscontact/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <unordered_map>

#include "viscontact/errors.hpp"

namespace viscontact {

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string node_str(const Mesh2D& mesh, int n) {
  return "node " + std::to_string(n) + " at (" + format_double(mesh.nodes(0, n)) +
         ", " + format_double(mesh.nodes(1, n)) + ")";
}

double signed_area(const Mesh2D& mesh, int a, int b, int c) {
  const Vec2 e1 = mesh.nodes.col(b) - mesh.nodes.col(a);
  const Vec2 e2 = mesh.nodes.col(c) - mesh.nodes.col(a);
  return 0.5 * (e1.x() * e2.y() - e1.y() * e2.x());
}

}  // namespace

const char* to_string(EdgeTag tag) {
  switch (tag) {
    case EdgeTag::Fixed: return "FIXED";
    case EdgeTag::Traction: return "TRACTION";
    case EdgeTag::ContactA: return "CONTACT_A";
    case EdgeTag::ContactB: return "CONTACT_B";
    case EdgeTag::Free: return "FREE";
  }
  return "?";
}

double Mesh2D::triangle_area(int t) const {
  return signed_area(*this, triangles(0, t), triangles(1, t), triangles(2, t));
}

double Mesh2D::total_area() const {
  double sum = 0.0;
  for (int t = 0; t < triangle_count(); ++t) sum += triangle_area(t);
  return sum;
}

double Mesh2D::diameter() const {
  if (nodes.cols() == 0) return 0.0;
  const Vec2 lo = nodes.rowwise().minCoeff();
  const Vec2 hi = nodes.rowwise().maxCoeff();
  return (hi - lo).norm();
}

namespace {

struct GridBuilder {
  int nx, ny;
  double hx, hy;

  int grid_id(int i, int j) const { return j * (nx + 1) + i; }
};

}  // namespace

Mesh2D build_rectangle(double width, double height, int resolution) {
  return build_notched_rectangle(width, height, 0.0, 0.0, -1.0, 0.0, resolution);
}

Mesh2D build_notched_rectangle(double width, double height, double slit_x0,
                               double slit_x1, double slit_y,
                               double initial_gap, int resolution) {
  if (width <= 0.0 || height <= 0.0) throw GeometryError("width and height must be positive");
  if (resolution < 1) throw GeometryError("resolution must be >= 1");
  if (initial_gap < 0.0) throw GeometryError("initial_gap must be >= 0");

  GridBuilder g;
  g.nx = resolution;
  g.ny = std::max(1, static_cast<int>(std::lround(resolution * height / width)));
  g.hx = width / g.nx;
  g.hy = height / g.ny;

  const bool has_slit = slit_y >= 0.0;
  int col0 = 0, col1 = 0, row = 0;
  if (has_slit) {
    col0 = static_cast<int>(std::lround(slit_x0 / g.hx));
    col1 = static_cast<int>(std::lround(slit_x1 / g.hx));
    row = static_cast<int>(std::lround(slit_y / g.hy));
    if (col0 < 1 || col1 > g.nx - 1 || row < 1 || row > g.ny - 1)
      throw GeometryError("slit touches the outer boundary");
    if (col1 - col0 < 2)
      throw GeometryError("slit spans fewer than two grid cells; no lip nodes to split");
    if (initial_gap >= g.hy)
      throw GeometryError("initial_gap must be smaller than one cell height (" +
                          format_double(g.hy) + ")");
  }

  const int grid_nodes = (g.nx + 1) * (g.ny + 1);
  const int lip_nodes = has_slit ? col1 - col0 - 1 : 0;

  Mesh2D mesh;
  mesh.nodes.resize(2, grid_nodes + lip_nodes);
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i)
      mesh.nodes.col(g.grid_id(i, j)) = Vec2(i * g.hx, j * g.hy);

  // Duplicate the interior slit nodes; the copies form the upper lip.
  std::unordered_map<int, int> upper;
  for (int c = col0 + 1, next = grid_nodes; c < col1; ++c, ++next) {
    mesh.nodes.col(next) = Vec2(c * g.hx, row * g.hy + initial_gap);
    upper[c] = next;
  }
  auto upper_or_tip = [&](int c) {
    auto it = upper.find(c);
    return it == upper.end() ? g.grid_id(c, row) : it->second;
  };

  mesh.triangles.resize(3, 2 * g.nx * g.ny);
  int t = 0;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      int n00 = g.grid_id(i, j);
      int n10 = g.grid_id(i + 1, j);
      const int n01 = g.grid_id(i, j + 1);
      const int n11 = g.grid_id(i + 1, j + 1);
      if (has_slit && j == row) {  // cell rests on the slit: use upper copies
        n00 = upper_or_tip(i);
        n10 = upper_or_tip(i + 1);
      }
      mesh.triangles.col(t++) = Eigen::Vector3i(n00, n10, n11);
      mesh.triangles.col(t++) = Eigen::Vector3i(n00, n11, n01);
    }
  }

  for (int i = 0; i < g.nx; ++i) {
    mesh.boundary_edges.push_back({g.grid_id(i, 0), g.grid_id(i + 1, 0), EdgeTag::Fixed});
    mesh.boundary_edges.push_back({g.grid_id(i, g.ny), g.grid_id(i + 1, g.ny), EdgeTag::Traction});
  }
  for (int j = 0; j < g.ny; ++j) {
    mesh.boundary_edges.push_back({g.grid_id(0, j), g.grid_id(0, j + 1), EdgeTag::Free});
    mesh.boundary_edges.push_back({g.grid_id(g.nx, j), g.grid_id(g.nx, j + 1), EdgeTag::Free});
  }
  if (has_slit) {
    for (int c = col0; c < col1; ++c) {
      mesh.boundary_edges.push_back({g.grid_id(c, row), g.grid_id(c + 1, row), EdgeTag::ContactB});
      mesh.boundary_edges.push_back({upper_or_tip(c), upper_or_tip(c + 1), EdgeTag::ContactA});
    }
  }
  return mesh;
}

namespace {

struct Tokenizer {
  std::istringstream in;
  std::string line;
  int line_number = 0;
  std::istringstream fields;

  explicit Tokenizer(const std::string& text) : in(text) {}

  // Advances to the next token, crossing line boundaries. Returns false at EOF.
  bool next(std::string& token) {
    while (true) {
      if (fields >> token) {
        if (token[0] == '#') {  // comment: drop the rest of the line
          fields.str("");
          fields.clear();
          continue;
        }
        return true;
      }
      if (!std::getline(in, line)) return false;
      ++line_number;
      fields.str(line);
      fields.clear();
    }
  }

  std::string expect(const char* what) {
    std::string token;
    if (!next(token)) throw ParseError(std::string("unexpected end of file, expected ") + what,
                                       line_number);
    return token;
  }

  long integer(const char* what) {
    const std::string token = expect(what);
    try {
      std::size_t pos = 0;
      const long v = std::stol(token, &pos);
      if (pos != token.size()) throw std::invalid_argument(token);
      return v;
    } catch (const std::exception&) {
      throw ParseError("expected integer " + std::string(what) + ", got '" + token + "'",
                       line_number);
    }
  }

  double real(const char* what) {
    const std::string token = expect(what);
    try {
      std::size_t pos = 0;
      const double v = std::stod(token, &pos);
      if (pos != token.size()) throw std::invalid_argument(token);
      return v;
    } catch (const std::exception&) {
      throw ParseError("expected number " + std::string(what) + ", got '" + token + "'",
                       line_number);
    }
  }

  void section(const char* name) {
    std::string token;
    if (!next(token)) throw ParseError(std::string("missing section ") + name, line_number);
    if (token != name)
      throw ParseError("expected section " + std::string(name) + ", got '" + token + "'",
                       line_number);
  }
};

EdgeTag parse_tag(const std::string& s, int line) {
  if (s == "FIXED") return EdgeTag::Fixed;
  if (s == "TRACTION") return EdgeTag::Traction;
  if (s == "CONTACT_A") return EdgeTag::ContactA;
  if (s == "CONTACT_B") return EdgeTag::ContactB;
  if (s == "FREE") return EdgeTag::Free;
  throw ParseError("unknown edge tag '" + s + "'", line);
}

}  // namespace

Mesh2D load_mesh(const std::string& text, std::vector<std::string>* warnings) {
  Tokenizer tok(text);
  Mesh2D mesh;

  tok.section("NODES");
  const long n_nodes = tok.integer("node count");
  if (n_nodes < 0) throw ParseError("negative node count", tok.line_number);
  mesh.nodes.resize(2, n_nodes);
  for (long k = 0; k < n_nodes; ++k) {
    const long id = tok.integer("node id");
    if (id != k) throw ParseError("expected node id " + std::to_string(k), tok.line_number);
    mesh.nodes(0, k) = tok.real("x1");
    mesh.nodes(1, k) = tok.real("x2");
  }

  tok.section("TRIANGLES");
  const long n_tris = tok.integer("triangle count");
  if (n_tris < 0) throw ParseError("negative triangle count", tok.line_number);
  mesh.triangles.resize(3, n_tris);
  for (long k = 0; k < n_tris; ++k) {
    const long id = tok.integer("triangle id");
    if (id != k) throw ParseError("expected triangle id " + std::to_string(k), tok.line_number);
    for (int v = 0; v < 3; ++v) {
      const long n = tok.integer("vertex index");
      if (n < 0 || n >= n_nodes)
        throw ParseError("vertex index " + std::to_string(n) + " out of range", tok.line_number);
      mesh.triangles(v, k) = static_cast<int>(n);
    }
    if (mesh.triangle_area(static_cast<int>(k)) < 0.0) {
      std::swap(mesh.triangles(1, k), mesh.triangles(2, k));
      if (warnings)
        warnings->push_back("triangle " + std::to_string(k) +
                            " was negatively oriented; vertices swapped");
    }
  }

  tok.section("EDGES");
  const long n_edges = tok.integer("edge count");
  if (n_edges < 0) throw ParseError("negative edge count", tok.line_number);
  mesh.boundary_edges.reserve(n_edges);
  for (long k = 0; k < n_edges; ++k) {
    BoundaryEdge e;
    const long a = tok.integer("edge node");
    const long b = tok.integer("edge node");
    if (a < 0 || a >= n_nodes || b < 0 || b >= n_nodes)
      throw ParseError("edge node index out of range", tok.line_number);
    e.a = static_cast<int>(a);
    e.b = static_cast<int>(b);
    e.tag = parse_tag(tok.expect("edge tag"), tok.line_number);
    mesh.boundary_edges.push_back(e);
  }

  std::string trailing;
  if (tok.next(trailing))
    throw ParseError("unexpected trailing token '" + trailing + "'", tok.line_number);

  const MeshReport report = validate(mesh);
  for (const MeshCheck& c : report.checks)
    if (!c.pass) throw Error("invalid mesh: " + c.name + ": " + c.detail);
  if (warnings)
    for (const MeshCheck& w : report.warnings) warnings->push_back(w.name + ": " + w.detail);
  return mesh;
}

std::string write_mesh(const Mesh2D& mesh) {
  std::ostringstream out;
  out << "# viscontact mesh\n";
  out << "NODES " << mesh.node_count() << "\n";
  for (int n = 0; n < mesh.node_count(); ++n)
    out << n << " " << format_double(mesh.nodes(0, n)) << " " << format_double(mesh.nodes(1, n))
        << "\n";
  out << "TRIANGLES " << mesh.triangle_count() << "\n";
  for (int t = 0; t < mesh.triangle_count(); ++t)
    out << t << " " << mesh.triangles(0, t) << " " << mesh.triangles(1, t) << " "
        << mesh.triangles(2, t) << "\n";
  out << "EDGES " << mesh.boundary_edges.size() << "\n";
  for (const BoundaryEdge& e : mesh.boundary_edges)
    out << e.a << " " << e.b << " " << to_string(e.tag) << "\n";
  return out.str();
}

bool MeshReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const MeshCheck& c) { return c.pass; });
}

std::string MeshReport::summary() const {
  std::ostringstream out;
  for (const MeshCheck& c : checks)
    out << (c.pass ? "pass " : "FAIL ") << c.name << (c.detail.empty() ? "" : ": " + c.detail)
        << "\n";
  for (const MeshCheck& w : warnings) out << "warn " << w.name << ": " << w.detail << "\n";
  return out.str();
}

MeshReport validate(const Mesh2D& mesh) {
  MeshReport report;

  // Index sanity first; later checks assume it.
  {
    MeshCheck c{"indices_in_range", true, ""};
    for (int t = 0; t < mesh.triangle_count() && c.pass; ++t)
      for (int v = 0; v < 3; ++v) {
        const int n = mesh.triangles(v, t);
        if (n < 0 || n >= mesh.node_count()) {
          c.pass = false;
          c.detail = "triangle " + std::to_string(t) + " references node " + std::to_string(n);
          break;
        }
      }
    for (const BoundaryEdge& e : mesh.boundary_edges) {
      if (!c.pass) break;
      if (e.a < 0 || e.a >= mesh.node_count() || e.b < 0 || e.b >= mesh.node_count()) {
        c.pass = false;
        c.detail = "boundary edge references a node out of range";
      }
    }
    const bool ok = c.pass;
    report.checks.push_back(std::move(c));
    if (!ok) return report;
  }

  {
    MeshCheck c{"positive_triangle_area", true, ""};
    int listed = 0;
    for (int t = 0; t < mesh.triangle_count(); ++t) {
      if (mesh.triangle_area(t) <= 0.0) {
        c.pass = false;
        if (listed++ < 8) c.detail += (c.detail.empty() ? "triangle " : ", ") + std::to_string(t);
      }
    }
    report.checks.push_back(std::move(c));
  }

  {
    MeshCheck c{"fixed_boundary_nonempty", true, ""};
    const bool any_fixed =
        std::any_of(mesh.boundary_edges.begin(), mesh.boundary_edges.end(),
                    [](const BoundaryEdge& e) { return e.tag == EdgeTag::Fixed; });
    if (!any_fixed) {
      c.pass = false;
      c.detail = "measure(FIXED) = 0: no FIXED boundary edges";
    }
    report.checks.push_back(std::move(c));
  }

  {
    MeshCheck c{"tags_partition_boundary", true, ""};
    std::map<std::pair<int, int>, int> side_count;  // triangle edges
    auto key = [](int a, int b) { return std::make_pair(std::min(a, b), std::max(a, b)); };
    for (int t = 0; t < mesh.triangle_count(); ++t)
      for (int v = 0; v < 3; ++v)
        side_count[key(mesh.triangles(v, t), mesh.triangles((v + 1) % 3, t))] += 1;

    std::map<std::pair<int, int>, int> tagged;
    auto complain = [&](const std::string& what) {
      c.pass = false;
      if (!c.detail.empty()) c.detail += "; ";
      c.detail += what;
    };
    for (const BoundaryEdge& e : mesh.boundary_edges) {
      const auto k = key(e.a, e.b);
      if (++tagged[k] > 1)
        complain("edge (" + std::to_string(e.a) + "," + std::to_string(e.b) +
                 ") carries more than one tag");
      const auto it = side_count.find(k);
      if (it == side_count.end() || it->second != 1)
        complain("edge (" + std::to_string(e.a) + "," + std::to_string(e.b) +
                 ") is not on the mesh boundary");
    }
    for (const auto& [k, count] : side_count) {
      if (count == 1 && tagged.find(k) == tagged.end())
        complain("boundary edge (" + std::to_string(k.first) + "," + std::to_string(k.second) +
                 ") has no tag");
      if (count > 2)
        complain("edge (" + std::to_string(k.first) + "," + std::to_string(k.second) +
                 ") is shared by more than two triangles");
    }
    report.checks.push_back(std::move(c));
  }

  report.checks.push_back({"dimension_2", true, "coordinates are 2D by construction"});

  {
    std::map<std::pair<double, double>, std::vector<int>> seen;
    for (int n = 0; n < mesh.node_count(); ++n)
      seen[{mesh.nodes(0, n), mesh.nodes(1, n)}].push_back(n);
    std::string detail;
    int listed = 0;
    for (const auto& [xy, ids] : seen) {
      if (ids.size() < 2) continue;
      if (listed++ >= 8) break;
      if (!detail.empty()) detail += ", ";
      detail += "(";
      for (std::size_t i = 0; i < ids.size(); ++i)
        detail += (i ? " " : "") + std::to_string(ids[i]);
      detail += ")";
    }
    if (!detail.empty())
      report.warnings.push_back({"duplicate_node_coordinates", true, "node groups " + detail});
  }

  return report;
}

ConstraintSet match_contact_pairs(const Mesh2D& mesh, double tol) {
  if (tol <= 0.0) tol = 1e-9 * mesh.diameter();

  // 1 = touches CONTACT_A, 2 = touches CONTACT_B; 3 marks a slit end, which
  // stays a single shared node and carries no constraint.
  std::vector<int> mask(mesh.node_count(), 0);
  for (const BoundaryEdge& e : mesh.boundary_edges) {
    int bit = 0;
    if (e.tag == EdgeTag::ContactA) bit = 1;
    if (e.tag == EdgeTag::ContactB) bit = 2;
    if (bit) {
      mask[e.a] |= bit;
      mask[e.b] |= bit;
    }
  }

  std::vector<int> side_a, side_b;
  for (int n = 0; n < mesh.node_count(); ++n) {
    if (mask[n] == 1) side_a.push_back(n);
    if (mask[n] == 2) side_b.push_back(n);
  }
  auto by_x1 = [&](int l, int r) {
    return mesh.nodes(0, l) != mesh.nodes(0, r) ? mesh.nodes(0, l) < mesh.nodes(0, r) : l < r;
  };
  std::sort(side_a.begin(), side_a.end(), by_x1);
  std::sort(side_b.begin(), side_b.end(), by_x1);

  ConstraintSet set;
  std::vector<bool> used(side_b.size(), false);
  for (const int a : side_a) {
    int found = -1;
    for (std::size_t k = 0; k < side_b.size(); ++k) {
      if (std::abs(mesh.nodes(0, side_b[k]) - mesh.nodes(0, a)) > tol) continue;
      if (found >= 0)
        throw Error("ambiguous contact match: " + node_str(mesh, a) + " has candidates " +
                    node_str(mesh, side_b[found]) + " and " + node_str(mesh, side_b[k]));
      found = static_cast<int>(k);
    }
    if (found < 0) throw Error("unmatched contact " + node_str(mesh, a));
    if (used[found])
      throw Error("contact " + node_str(mesh, side_b[found]) + " matched by two CONTACT_A nodes");
    used[found] = true;

    ContactPair p;
    p.node_a = a;
    p.node_b = side_b[found];
    const double ya = mesh.nodes(1, a);
    const double yb = mesh.nodes(1, p.node_b);
    p.gap = std::abs(ya - yb);
    p.normal = Vec2(0.0, yb > ya ? 1.0 : -1.0);
    set.pairs.push_back(p);
  }
  for (std::size_t k = 0; k < side_b.size(); ++k)
    if (!used[k]) throw Error("unmatched contact " + node_str(mesh, side_b[k]));
  return set;
}

}  // namespace viscontact
