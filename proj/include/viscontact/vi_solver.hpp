#pragma once

#include <vector>

#include "viscontact/assembly.hpp"
#include "viscontact/mesh.hpp"
#include "viscontact/solver_config.hpp"
#include "viscontact/types.hpp"

namespace viscontact {

/// The admissible set K = { u : (u_a - u_b) . nu <= g per contact pair },
/// expressed on the free dofs. Rows touch disjoint dofs (each contact node
/// belongs to one pair), so the Euclidean projection onto K decouples.
class AdmissibleSet {
 public:
  AdmissibleSet(const ConstraintSet& pairs, const DofMap& dofs);

  int count() const { return static_cast<int>(rows_.size()); }

  /// In-place Euclidean projection onto K.
  void project(VectorX& u) const;

  /// Per-pair constraint residuals (Cu - g)_p; feasible iff all <= 0.
  VectorX residuals(const VectorX& u) const;

  /// max_p max(0, (Cu - g)_p).
  double violation(const VectorX& u) const;

  /// Least-squares multipliers from the stationarity residual grad = Au - b:
  /// lambda_p = max(0, -(r_p . grad) / |r_p|^2). Exact at a converged
  /// solution because constraint rows are orthogonal.
  VectorX multipliers(const VectorX& grad) const;

  /// Dof indices (up to 4) and coefficients of one constraint row.
  struct Row {
    int dof[4];
    double coeff[4];
    int entries = 0;
    double gap = 0.0;
    double norm2 = 0.0;
  };
  const Row& row(int p) const { return rows_[p]; }

 private:
  std::vector<Row> rows_;
};

struct VIResult {
  VectorX u;
  VectorX multipliers;  // one per pair, >= 0
  int iterations = 0;
  double residual = 0.0;               // final step norm |u_k+1 - u_k|
  std::vector<double> energy_history;  // 1/2 u.Au - b.u per iterate
};

/// Euclidean projection onto K (copying convenience wrapper).
VectorX project_admissible(VectorX u, const AdmissibleSet& K);

/// Solves the constrained problem: find u in K with
///   (Au, v - u) >= (b, v - u) for all v in K,
/// by projected gradient u <- P_K(u - rho (Au - b)) with rho = 1/lambda_max
/// unless cfg.vi_step overrides it. Stops when the step norm drops below
/// cfg.vi_tol (1 + |u|). Throws NonconvergenceError at the iteration cap.
VIResult solve_vi(const StiffnessOperator& A, const VectorX& b, const AdmissibleSet& K,
                  const SolverConfig& cfg, const VectorX* warm_start = nullptr);

/// Least-squares contact pressures at a given displacement (see
/// AdmissibleSet::multipliers).
VectorX contact_pressure(const StiffnessOperator& A, const VectorX& b, const VectorX& u,
                         const AdmissibleSet& K);

/// Reference solver: enumerates all 2^p active sets of the equivalent QP
/// min 1/2 u.Au - b.u over K and returns the candidate that is primal
/// feasible with nonnegative multipliers. Exponential; requires p <= 12.
/// If multipliers_out is nonnull it receives the per-pair multipliers.
VectorX solve_qp_activeset_oracle(const MatrixX& A_dense, const VectorX& b,
                                  const AdmissibleSet& K,
                                  VectorX* multipliers_out = nullptr);

/// Pairs held active at displacement u: residual within atol of the bound.
std::vector<int> active_pairs(const AdmissibleSet& K, const VectorX& u, double atol);

}  // namespace viscontact
