#pragma once

#include <vector>

#include "viscontact/assembly.hpp"
#include "viscontact/material.hpp"
#include "viscontact/mesh.hpp"
#include "viscontact/solver_config.hpp"
#include "viscontact/types.hpp"
#include "viscontact/vi_solver.hpp"

namespace viscontact {

/// Uniform partition t_j = j dt, j = 0..steps of [0, T].
struct TimeGrid {
  double dt = 0.1;
  int steps = 10;

  int node_count() const { return steps + 1; }
  double time(int j) const { return j * dt; }
  double horizon() const { return steps * dt; }

  /// Requires T to be an integer multiple of dt (relative slack 1e-9).
  static TimeGrid from_horizon(double dt, double T);
};

/// Full problem data. u0 and sigma0 are initial data entering the solve only
/// through the history offset sigma0 - E eps(u0); in particular the computed
/// displacement at t = 0 solves the t = 0 inequality and is not forced to
/// equal u0. Empty u0 / sigma0 mean zero.
struct ProblemSpec {
  Mesh2D mesh;
  ElasticTensor elastic = ElasticTensor::from_lame(1.0, 1.0);
  ViscoplasticLaw law = ViscoplasticLaw::zero();
  LoadSpec load;
  VectorX u0;
  TensorField sigma0;
  TimeGrid grid;
  SolverConfig config;
  double contact_match_tol = 0.0;     // 0 = automatic
  double contact_gap_override = -1.0;  // >= 0 replaces every geometric gap
};

/// Trajectory of the discrete triple (u_j, sigma_j, eta_j) with diagnostics.
/// The identity sigma_j = E eps(u_j) + eta_j holds exactly by construction.
struct DiscreteState {
  TimeGrid grid;
  std::vector<VectorX> u;
  std::vector<TensorField> sigma;
  std::vector<TensorField> eta;
  std::vector<VectorX> multipliers;
  std::vector<int> vi_iterations;

  // Fixed-point work charged to each node: the sweep count for the global
  // scheme, the inner iteration count for marching.
  std::vector<int> fp_iterations;

  // Picard: Q-norm residual per sweep. March: per-node inner residual.
  std::vector<double> fp_residuals;
  int sweeps = 0;
};

/// One spatial problem assembled once and shared by every time node.
class AssembledProblem {
 public:
  explicit AssembledProblem(ProblemSpec spec);

  const ProblemSpec& spec() const { return spec_; }
  const Mesh2D& mesh() const { return spec_.mesh; }
  const DofMap& dofs() const { return dofs_; }
  const StrainOperator& strain_op() const { return strain_; }
  const StiffnessOperator& stiffness() const { return stiffness_; }
  const ConstraintSet& pairs() const { return pairs_; }
  const AdmissibleSet& admissible() const { return admissible_; }

  /// sigma0 - E eps(u0): the constant part of every history term.
  const TensorField& history_offset() const { return offset_; }

  VectorX force(double t) const;

  struct Step {
    VectorX u;
    TensorField eps;
    TensorField sigma;
    VectorX multipliers;
    int iterations = 0;
  };

  /// Solves the inequality at time t for a fixed history term, then recovers
  /// the stress sigma = E eps(u) + eta.
  Step step_solve(const TensorField& eta, double t, const VectorX* warm_start = nullptr) const;

 private:
  ProblemSpec spec_;
  DofMap dofs_;
  StrainOperator strain_;
  StiffnessOperator stiffness_;
  ConstraintSet pairs_;
  AdmissibleSet admissible_;
  TensorField offset_;
};

/// Quadrature of the history integral: eta_j = dt * Quad_{s=0..j}(g_values)
/// + offset. Rectangle sums left endpoints s < j; trapezoid averages
/// endpoint pairs. j = 0 returns the offset under both rules.
TensorField integrate_history(const std::vector<TensorField>& g_values,
                              const TensorField& offset, double dt, Quadrature rule, int j);

/// Global fixed-point iteration: every sweep re-solves all time nodes from
/// the current history iterate, then rebuilds the history from the swept
/// trajectory. Stops when max_j |eta_new_j - eta_j|_Q <= fp_tol. Throws
/// NonconvergenceError (with the residual history) at the sweep cap.
/// eta0 optionally overrides the initial history iterate (defaults to the
/// history offset at every node); the converged answer does not depend on it.
DiscreteState picard_solve(const AssembledProblem& problem,
                           const std::vector<TensorField>* eta0 = nullptr);

/// Sequential time marching of the same discrete system. The rectangle rule
/// is explicit in j; the trapezoid rule couples eta_j to u_j and is resolved
/// by an inner fixed point with the same fp_tol.
DiscreteState march_solve(const AssembledProblem& problem);

/// Dispatches on problem.spec().config.scheme.
DiscreteState solve(const AssembledProblem& problem);

}  // namespace viscontact
