#pragma once

#include <string>
#include <vector>

#include <Eigen/SparseCore>

#include "viscontact/material.hpp"
#include "viscontact/mesh.hpp"
#include "viscontact/types.hpp"

namespace viscontact {

/// Numbering of the unknowns. Nodes on FIXED edges are eliminated; every
/// other node carries two consecutive scalar dofs (x1 then x2 component).
class DofMap {
 public:
  explicit DofMap(const Mesh2D& mesh);

  int node_count() const { return static_cast<int>(first_dof_.size()); }
  int free_dof_count() const { return n_free_; }
  bool is_fixed(int node) const { return first_dof_[node] < 0; }

  /// First scalar dof of a node, or -1 if the node is fixed.
  int dof_of(int node) const { return first_dof_[node]; }

  /// Scatter a free-dof vector to per-node displacements (2 x n_nodes),
  /// zeros on fixed nodes.
  Eigen::Matrix2Xd node_displacements(const Mesh2D& mesh, const VectorX& u) const;

 private:
  std::vector<int> first_dof_;
  int n_free_ = 0;
};

/// Piecewise-constant strain of a P1 displacement field, cached as one 3x6
/// element matrix per triangle (local dofs -> packed strain).
class StrainOperator {
 public:
  StrainOperator(const Mesh2D& mesh, const DofMap& dofs);

  TensorField apply(const VectorX& u) const;

  /// Adjoint against the area-weighted field inner product: returns r with
  /// r . v = sum_T area_T tau_T . (B_T v) for every free-dof vector v.
  VectorX apply_adjoint(const TensorField& tau) const;

  int triangle_count() const { return static_cast<int>(element_.size()); }
  const Eigen::Matrix<double, 3, 6>& element_matrix(int t) const { return element_[t]; }
  double area(int t) const { return area_[t]; }
  double total_area() const;

  /// Local free-dof indices of triangle t, -1 where fixed: order is
  /// (v0_x, v0_y, v1_x, v1_y, v2_x, v2_y).
  const std::array<int, 6>& local_dofs(int t) const { return dofs_[t]; }

 private:
  std::vector<Eigen::Matrix<double, 3, 6>> element_;
  std::vector<std::array<int, 6>> dofs_;
  std::vector<double> area_;
  int n_free_ = 0;
};

/// Sparse SPD stiffness operator on the free dofs, with a cached power
/// iteration estimate of its largest eigenvalue (used as VI step size).
class StiffnessOperator {
 public:
  StiffnessOperator(const Mesh2D& mesh, const DofMap& dofs, const ElasticTensor& E);

  int size() const { return static_cast<int>(matrix_.rows()); }
  const Eigen::SparseMatrix<double>& matrix() const { return matrix_; }
  VectorX apply(const VectorX& u) const { return matrix_ * u; }
  MatrixX dense() const { return MatrixX(matrix_); }

  /// Upper edge of the spectrum, from power iteration (tolerance 1e-6, at
  /// most 500 sweeps), computed once at assembly.
  double lambda_max() const { return lambda_max_; }

  double energy(const VectorX& u) const { return u.dot(matrix_ * u); }

 private:
  Eigen::SparseMatrix<double> matrix_;
  double lambda_max_ = 0.0;
};

/// Scalar time profile multiplying a load amplitude.
struct TimeProfile {
  enum class Kind { Constant, Ramp, Sine };
  Kind kind = Kind::Constant;
  double t_star = 1.0;  // ramp reaches 1 at t_star, constant afterwards
  double omega = 1.0;   // sine frequency

  double value(double t) const;

  /// Accepts "constant", "ramp:<t*>", "sin:<omega>".
  static TimeProfile parse(const std::string& text);
  std::string describe() const;
};

/// Body force density plus traction on TRACTION edges, both scaled by one
/// time profile.
struct LoadSpec {
  Vec2 body = Vec2::Zero();
  Vec2 traction = Vec2::Zero();
  TimeProfile profile;
};

TensorField strain(const Mesh2D& mesh, const DofMap& dofs, const VectorX& u);
StiffnessOperator assemble_stiffness(const Mesh2D& mesh, const DofMap& dofs,
                                     const ElasticTensor& E);
VectorX assemble_eta_load(const Mesh2D& mesh, const DofMap& dofs, const TensorField& eta);

/// f(t) . v = integral of body force against v (one-point rule per triangle)
/// plus traction against v on TRACTION edges (trapezoid rule); both exact
/// for P1 test functions.
VectorX assemble_force(const Mesh2D& mesh, const DofMap& dofs, const LoadSpec& load, double t);

/// Area-weighted Frobenius inner product of two piecewise-constant fields.
double q_inner(const Mesh2D& mesh, const TensorField& sigma, const TensorField& tau);
double q_norm(const Mesh2D& mesh, const TensorField& tau);

/// Strain norm of a displacement field: sqrt(q_inner(eps(u), eps(u))).
double v_norm(const Mesh2D& mesh, const DofMap& dofs, const VectorX& u);

}  // namespace viscontact
