#include "viscontact/assembly.hpp"

#include <cmath>
#include <vector>

#include <Eigen/Sparse>

#include "viscontact/errors.hpp"

namespace viscontact {

DofMap::DofMap(const Mesh2D& mesh) {
  first_dof_.assign(mesh.node_count(), 0);
  for (const BoundaryEdge& e : mesh.boundary_edges) {
    if (e.tag == EdgeTag::Fixed) {
      first_dof_[e.a] = -1;
      first_dof_[e.b] = -1;
    }
  }
  for (int n = 0; n < mesh.node_count(); ++n) {
    if (first_dof_[n] < 0) continue;
    first_dof_[n] = n_free_;
    n_free_ += 2;
  }
}

Eigen::Matrix2Xd DofMap::node_displacements(const Mesh2D& mesh, const VectorX& u) const {
  Eigen::Matrix2Xd out = Eigen::Matrix2Xd::Zero(2, mesh.node_count());
  for (int n = 0; n < mesh.node_count(); ++n) {
    const int d = first_dof_[n];
    if (d >= 0) out.col(n) = u.segment<2>(d);
  }
  return out;
}

StrainOperator::StrainOperator(const Mesh2D& mesh, const DofMap& dofs)
    : n_free_(dofs.free_dof_count()) {
  const int m = mesh.triangle_count();
  element_.resize(m);
  dofs_.resize(m);
  area_.resize(m);
  for (int t = 0; t < m; ++t) {
    const int n0 = mesh.triangles(0, t);
    const int n1 = mesh.triangles(1, t);
    const int n2 = mesh.triangles(2, t);
    const Vec2 p0 = mesh.nodes.col(n0);
    const Vec2 p1 = mesh.nodes.col(n1);
    const Vec2 p2 = mesh.nodes.col(n2);
    const double twice_area = (p1.x() - p0.x()) * (p2.y() - p0.y()) -
                              (p1.y() - p0.y()) * (p2.x() - p0.x());
    if (twice_area <= 0.0)
      throw GeometryError("triangle " + std::to_string(t) + " is degenerate or inverted");
    area_[t] = 0.5 * twice_area;

    // P1 shape-function gradients: grad N_i is the inward-rotated opposite
    // edge over twice the area.
    const Vec2 g0(p1.y() - p2.y(), p2.x() - p1.x());
    const Vec2 g1(p2.y() - p0.y(), p0.x() - p2.x());
    const Vec2 g2(p0.y() - p1.y(), p1.x() - p0.x());

    Eigen::Matrix<double, 3, 6>& B = element_[t];
    B.setZero();
    const Vec2 grads[3] = {g0 / twice_area, g1 / twice_area, g2 / twice_area};
    for (int v = 0; v < 3; ++v) {
      const Vec2& g = grads[v];
      B(0, 2 * v) = g.x();                            // eps_11 = d1 v1
      B(1, 2 * v + 1) = g.y();                        // eps_22 = d2 v2
      B(2, 2 * v) = g.y() / std::numbers::sqrt2;      // packed shear row:
      B(2, 2 * v + 1) = g.x() / std::numbers::sqrt2;  // sqrt2 eps_12
    }

    const int nodes[3] = {n0, n1, n2};
    for (int v = 0; v < 3; ++v) {
      const int d = dofs.dof_of(nodes[v]);
      dofs_[t][2 * v] = d;
      dofs_[t][2 * v + 1] = d < 0 ? -1 : d + 1;
    }
  }
}

TensorField StrainOperator::apply(const VectorX& u) const {
  TensorField eps = TensorField::Zero(3, triangle_count());
  for (int t = 0; t < triangle_count(); ++t) {
    Eigen::Matrix<double, 6, 1> local = Eigen::Matrix<double, 6, 1>::Zero();
    for (int k = 0; k < 6; ++k)
      if (dofs_[t][k] >= 0) local(k) = u(dofs_[t][k]);
    eps.col(t) = element_[t] * local;
  }
  return eps;
}

VectorX StrainOperator::apply_adjoint(const TensorField& tau) const {
  VectorX r = VectorX::Zero(n_free_);
  for (int t = 0; t < triangle_count(); ++t) {
    const Eigen::Matrix<double, 6, 1> local = area_[t] * (element_[t].transpose() * tau.col(t));
    for (int k = 0; k < 6; ++k)
      if (dofs_[t][k] >= 0) r(dofs_[t][k]) += local(k);
  }
  return r;
}

double StrainOperator::total_area() const {
  double sum = 0.0;
  for (double a : area_) sum += a;
  return sum;
}

namespace {

double power_iteration(const Eigen::SparseMatrix<double>& m) {
  const Eigen::Index n = m.rows();
  if (n == 0) return 0.0;
  // Fixed deterministic start with overlap on every mode.
  VectorX v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = 1.0 + 1e-3 * std::sin(static_cast<double>(i));
  v.normalize();
  double lambda = 0.0;
  for (int it = 0; it < 500; ++it) {
    VectorX w = m * v;
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    w /= norm;
    const double next = w.dot(m * w);
    const bool settled = std::abs(next - lambda) <= 1e-6 * std::abs(next);
    lambda = next;
    v.swap(w);
    if (settled) break;
  }
  return lambda;
}

}  // namespace

StiffnessOperator::StiffnessOperator(const Mesh2D& mesh, const DofMap& dofs,
                                     const ElasticTensor& E) {
  const StrainOperator strain_op(mesh, dofs);
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(36 * mesh.triangle_count());
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const Eigen::Matrix<double, 3, 6>& B = strain_op.element_matrix(t);
    const Eigen::Matrix<double, 6, 6> Ke =
        strain_op.area(t) * (B.transpose() * E.voigt() * B);
    const auto& local = strain_op.local_dofs(t);
    for (int r = 0; r < 6; ++r) {
      if (local[r] < 0) continue;
      for (int c = 0; c < 6; ++c)
        if (local[c] >= 0) triplets.emplace_back(local[r], local[c], Ke(r, c));
    }
  }
  matrix_.resize(dofs.free_dof_count(), dofs.free_dof_count());
  matrix_.setFromTriplets(triplets.begin(), triplets.end());
  matrix_.makeCompressed();
  lambda_max_ = power_iteration(matrix_);
  if (dofs.free_dof_count() > 0 && lambda_max_ <= 0.0)
    throw Error("stiffness operator is singular; is the FIXED boundary effective?");
}

double TimeProfile::value(double t) const {
  switch (kind) {
    case Kind::Constant: return 1.0;
    case Kind::Ramp: return t >= t_star ? 1.0 : t / t_star;
    case Kind::Sine: return std::sin(omega * t);
  }
  return 1.0;
}

TimeProfile TimeProfile::parse(const std::string& text) {
  TimeProfile p;
  if (text == "constant") return p;
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  double arg = 0.0;
  if (colon != std::string::npos) {
    try {
      std::size_t pos = 0;
      arg = std::stod(text.substr(colon + 1), &pos);
      if (pos != text.size() - colon - 1) throw std::invalid_argument(text);
    } catch (const std::exception&) {
      throw Error("bad profile parameter in '" + text + "'");
    }
  }
  if (head == "ramp") {
    if (colon == std::string::npos || arg <= 0.0)
      throw Error("ramp profile needs a positive time, e.g. ramp:0.5");
    p.kind = Kind::Ramp;
    p.t_star = arg;
    return p;
  }
  if (head == "sin") {
    if (colon == std::string::npos)
      throw Error("sin profile needs a frequency, e.g. sin:3.14");
    p.kind = Kind::Sine;
    p.omega = arg;
    return p;
  }
  throw Error("unknown load profile '" + text + "' (want constant, ramp:<t>, sin:<omega>)");
}

std::string TimeProfile::describe() const {
  char buf[48];
  switch (kind) {
    case Kind::Constant: return "constant";
    case Kind::Ramp:
      std::snprintf(buf, sizeof(buf), "ramp:%.17g", t_star);
      return buf;
    case Kind::Sine:
      std::snprintf(buf, sizeof(buf), "sin:%.17g", omega);
      return buf;
  }
  return "constant";
}

TensorField strain(const Mesh2D& mesh, const DofMap& dofs, const VectorX& u) {
  return StrainOperator(mesh, dofs).apply(u);
}

StiffnessOperator assemble_stiffness(const Mesh2D& mesh, const DofMap& dofs,
                                     const ElasticTensor& E) {
  return StiffnessOperator(mesh, dofs, E);
}

VectorX assemble_eta_load(const Mesh2D& mesh, const DofMap& dofs, const TensorField& eta) {
  return StrainOperator(mesh, dofs).apply_adjoint(eta);
}

VectorX assemble_force(const Mesh2D& mesh, const DofMap& dofs, const LoadSpec& load, double t) {
  VectorX f = VectorX::Zero(dofs.free_dof_count());
  const double scale = load.profile.value(t);

  const Vec2 body = scale * load.body;
  if (!body.isZero()) {
    for (int tri = 0; tri < mesh.triangle_count(); ++tri) {
      const double w = mesh.triangle_area(tri) / 3.0;
      for (int v = 0; v < 3; ++v) {
        const int d = dofs.dof_of(mesh.triangles(v, tri));
        if (d >= 0) f.segment<2>(d) += w * body;
      }
    }
  }

  const Vec2 traction = scale * load.traction;
  if (!traction.isZero()) {
    for (const BoundaryEdge& e : mesh.boundary_edges) {
      if (e.tag != EdgeTag::Traction) continue;
      const double w = 0.5 * (mesh.nodes.col(e.b) - mesh.nodes.col(e.a)).norm();
      for (const int n : {e.a, e.b}) {
        const int d = dofs.dof_of(n);
        if (d >= 0) f.segment<2>(d) += w * traction;
      }
    }
  }
  return f;
}

double q_inner(const Mesh2D& mesh, const TensorField& sigma, const TensorField& tau) {
  double sum = 0.0;
  for (int t = 0; t < mesh.triangle_count(); ++t)
    sum += mesh.triangle_area(t) * sigma.col(t).dot(tau.col(t));
  return sum;
}

double q_norm(const Mesh2D& mesh, const TensorField& tau) {
  return std::sqrt(q_inner(mesh, tau, tau));
}

double v_norm(const Mesh2D& mesh, const DofMap& dofs, const VectorX& u) {
  const TensorField eps = strain(mesh, dofs, u);
  return q_norm(mesh, eps);
}

}  // namespace viscontact
