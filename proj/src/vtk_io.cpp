#include "viscontact/vtk_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "viscontact/errors.hpp"

namespace viscontact {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void cell_scalars(std::ostringstream& out, const char* name, const TensorField& field,
                  int component) {
  out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
  for (Eigen::Index c = 0; c < field.cols(); ++c) {
    // Unpack the scaled shear component back to the physical tensor entry.
    const double v = component < 2 ? field(component, c)
                                   : field(2, c) / std::numbers::sqrt2;
    out << fmt(v) << "\n";
  }
}

}  // namespace

std::string vtk_snapshot(const Mesh2D& mesh, const DofMap& dofs, const ConstraintSet& pairs,
                         const VectorX& u, const TensorField& sigma, const TensorField& eta,
                         const VectorX& multipliers, double t, const OutputFields& fields) {
  std::ostringstream out;
  out << "# vtk DataFile Version 3.0\n";
  out << "viscontact snapshot t = " << fmt(t) << "\n";
  out << "ASCII\nDATASET UNSTRUCTURED_GRID\n";

  out << "POINTS " << mesh.node_count() << " double\n";
  for (int n = 0; n < mesh.node_count(); ++n)
    out << fmt(mesh.nodes(0, n)) << " " << fmt(mesh.nodes(1, n)) << " 0\n";

  const int m = mesh.triangle_count();
  out << "CELLS " << m << " " << 4 * m << "\n";
  for (int c = 0; c < m; ++c)
    out << "3 " << mesh.triangles(0, c) << " " << mesh.triangles(1, c) << " "
        << mesh.triangles(2, c) << "\n";
  out << "CELL_TYPES " << m << "\n";
  for (int c = 0; c < m; ++c) out << "5\n";

  if (fields.u || fields.lambda) {
    out << "POINT_DATA " << mesh.node_count() << "\n";
    if (fields.u) {
      const Eigen::Matrix2Xd nodal = dofs.node_displacements(mesh, u);
      out << "VECTORS displacement double\n";
      for (int n = 0; n < mesh.node_count(); ++n)
        out << fmt(nodal(0, n)) << " " << fmt(nodal(1, n)) << " 0\n";
    }
    if (fields.lambda) {
      VectorX nodal = VectorX::Zero(mesh.node_count());
      for (std::size_t p = 0; p < pairs.pairs.size(); ++p) {
        const double lam = p < static_cast<std::size_t>(multipliers.size()) ? multipliers(p) : 0.0;
        nodal(pairs.pairs[p].node_a) = lam;
        nodal(pairs.pairs[p].node_b) = lam;
      }
      out << "SCALARS contact_pressure double 1\nLOOKUP_TABLE default\n";
      for (int n = 0; n < mesh.node_count(); ++n) out << fmt(nodal(n)) << "\n";
    }
  }

  if (fields.sigma || fields.eta) {
    out << "CELL_DATA " << m << "\n";
    if (fields.sigma) {
      cell_scalars(out, "sigma_11", sigma, 0);
      cell_scalars(out, "sigma_22", sigma, 1);
      cell_scalars(out, "sigma_12", sigma, 2);
    }
    if (fields.eta) {
      cell_scalars(out, "eta_11", eta, 0);
      cell_scalars(out, "eta_22", eta, 1);
      cell_scalars(out, "eta_12", eta, 2);
    }
  }
  return out.str();
}

std::string vtk_snapshot(const AssembledProblem& problem, const DiscreteState& state, int j,
                         const OutputFields& fields) {
  return vtk_snapshot(problem.mesh(), problem.dofs(), problem.pairs(), state.u[j],
                      state.sigma[j], state.eta[j], state.multipliers[j], state.grid.time(j),
                      fields);
}

std::string timeseries_csv(const AssembledProblem& problem, const DiscreteState& state) {
  std::ostringstream out;
  out << "t,max_gap_residual,total_contact_force,v_norm_u,q_norm_sigma,fp_iterations\n";
  for (std::size_t j = 0; j < state.u.size(); ++j) {
    const double violation = problem.admissible().violation(state.u[j]);
    const double force = state.multipliers[j].size() ? state.multipliers[j].sum() : 0.0;
    out << fmt(state.grid.time(static_cast<int>(j))) << "," << fmt(violation) << ","
        << fmt(force) << "," << fmt(v_norm(problem.mesh(), problem.dofs(), state.u[j])) << ","
        << fmt(q_norm(problem.mesh(), state.sigma[j])) << "," << state.fp_iterations[j]
        << "\n";
  }
  return out.str();
}

void save_text(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(p.parent_path(), ec);
    if (ec) throw Error("cannot create directory " + p.parent_path().string());
  }
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot open " + path + " for writing");
  out << text;
  if (!out.good()) throw Error("failed writing " + path);
}

std::string load_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace viscontact
