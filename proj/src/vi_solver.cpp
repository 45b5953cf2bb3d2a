#include "viscontact/vi_solver.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <Eigen/Cholesky>

#include "viscontact/errors.hpp"

namespace viscontact {

AdmissibleSet::AdmissibleSet(const ConstraintSet& pairs, const DofMap& dofs) {
  std::set<int> touched;
  rows_.reserve(pairs.pairs.size());
  for (const ContactPair& pair : pairs.pairs) {
    Row row;
    auto add_node = [&](int node, double sign) {
      const int d = dofs.dof_of(node);
      if (d < 0) return;  // fixed node: its side of the jump is zero
      for (int c = 0; c < 2; ++c) {
        const double coeff = sign * pair.normal(c);
        if (coeff == 0.0) continue;
        row.dof[row.entries] = d + c;
        row.coeff[row.entries] = coeff;
        ++row.entries;
      }
    };
    add_node(pair.node_a, 1.0);
    add_node(pair.node_b, -1.0);
    row.gap = pair.gap;
    for (int k = 0; k < row.entries; ++k) {
      row.norm2 += row.coeff[k] * row.coeff[k];
      if (!touched.insert(row.dof[k]).second)
        throw Error("contact constraint rows are not disjoint (dof " +
                    std::to_string(row.dof[k]) + " appears twice)");
    }
    if (row.entries == 0 && row.gap < 0.0)
      throw Error("contact pair between fixed nodes with negative gap is infeasible");
    rows_.push_back(row);
  }
}

void AdmissibleSet::project(VectorX& u) const {
  for (const Row& row : rows_) {
    if (row.norm2 == 0.0) continue;
    double s = -row.gap;
    for (int k = 0; k < row.entries; ++k) s += row.coeff[k] * u(row.dof[k]);
    if (s <= 0.0) continue;
    const double scale = s / row.norm2;
    for (int k = 0; k < row.entries; ++k) u(row.dof[k]) -= scale * row.coeff[k];
  }
}

VectorX AdmissibleSet::residuals(const VectorX& u) const {
  VectorX r(count());
  for (int p = 0; p < count(); ++p) {
    const Row& row = rows_[p];
    double s = -row.gap;
    for (int k = 0; k < row.entries; ++k) s += row.coeff[k] * u(row.dof[k]);
    r(p) = s;
  }
  return r;
}

double AdmissibleSet::violation(const VectorX& u) const {
  double worst = 0.0;
  if (count() > 0) worst = std::max(0.0, residuals(u).maxCoeff());
  return worst;
}

VectorX AdmissibleSet::multipliers(const VectorX& grad) const {
  VectorX lambda = VectorX::Zero(count());
  for (int p = 0; p < count(); ++p) {
    const Row& row = rows_[p];
    if (row.norm2 == 0.0) continue;
    double dot = 0.0;
    for (int k = 0; k < row.entries; ++k) dot += row.coeff[k] * grad(row.dof[k]);
    lambda(p) = std::max(0.0, -dot / row.norm2);
  }
  return lambda;
}

VectorX project_admissible(VectorX u, const AdmissibleSet& K) {
  K.project(u);
  return u;
}

VIResult solve_vi(const StiffnessOperator& A, const VectorX& b, const AdmissibleSet& K,
                  const SolverConfig& cfg, const VectorX* warm_start) {
  const int n = A.size();
  VIResult result;
  if (n == 0) {
    result.u = VectorX();
    result.multipliers = VectorX::Zero(K.count());
    return result;
  }

  VectorX u = (warm_start && warm_start->size() == n) ? *warm_start : VectorX::Zero(n);
  K.project(u);

  const double rho = cfg.vi_step > 0.0 ? cfg.vi_step : 1.0 / A.lambda_max();
  const long cap = cfg.vi_max_iters > 0 ? cfg.vi_max_iters : 50L * n;

  double step_norm = 0.0;
  bool converged = false;
  VectorX next(n);
  for (long it = 1; it <= cap; ++it) {
    const VectorX grad = A.apply(u) - b;
    result.energy_history.push_back(0.5 * (u.dot(grad) - u.dot(b)));
    next = u - rho * grad;
    K.project(next);
    step_norm = (next - u).norm();
    u.swap(next);
    result.iterations = static_cast<int>(it);
    if (step_norm <= cfg.vi_tol * (1.0 + u.norm())) {
      converged = true;
      break;
    }
  }
  if (!converged)
    throw NonconvergenceError("projected gradient hit the iteration cap (" +
                                  std::to_string(cap) + ")",
                              step_norm);

  result.u = std::move(u);
  result.residual = step_norm;
  result.multipliers = K.multipliers(A.apply(result.u) - b);
  return result;
}

VectorX contact_pressure(const StiffnessOperator& A, const VectorX& b, const VectorX& u,
                         const AdmissibleSet& K) {
  return K.multipliers(A.apply(u) - b);
}

std::vector<int> active_pairs(const AdmissibleSet& K, const VectorX& u, double atol) {
  std::vector<int> active;
  const VectorX r = K.residuals(u);
  for (int p = 0; p < K.count(); ++p)
    if (r(p) >= -atol) active.push_back(p);
  return active;
}

VectorX solve_qp_activeset_oracle(const MatrixX& A_dense, const VectorX& b,
                                  const AdmissibleSet& K, VectorX* multipliers_out) {
  const int p = K.count();
  if (p > 12) throw Error("active-set oracle limited to 12 constraints, got " + std::to_string(p));
  if (A_dense.rows() != A_dense.cols() || A_dense.rows() != b.size())
    throw Error("oracle operator/load size mismatch");

  const Eigen::LLT<MatrixX> llt(A_dense);
  if (llt.info() != Eigen::Success) throw Error("oracle operator is not positive definite");

  const VectorX base = llt.solve(b);  // unconstrained minimizer

  // Dense constraint rows, their A-inverse images, and the full Schur matrix
  // S_ij = r_i . A^-1 r_j, computed once.
  MatrixX rowsT = MatrixX::Zero(b.size(), p);
  VectorX gaps(p);
  for (int i = 0; i < p; ++i) {
    const AdmissibleSet::Row& row = K.row(i);
    for (int k = 0; k < row.entries; ++k) rowsT(row.dof[k], i) = row.coeff[k];
    gaps(i) = row.gap;
  }
  const MatrixX inv_rowsT = llt.solve(rowsT);
  const MatrixX schur = rowsT.transpose() * inv_rowsT;
  const VectorX slack = rowsT.transpose() * base - gaps;  // residuals at the minimizer

  const double feas_tol = 1e-10 * (1.0 + base.norm());
  for (unsigned subset = 0; subset < (1u << p); ++subset) {
    std::vector<int> act;
    for (int i = 0; i < p; ++i)
      if (subset & (1u << i)) act.push_back(i);

    VectorX u = base;
    VectorX lambda = VectorX::Zero(p);
    if (!act.empty()) {
      const int a = static_cast<int>(act.size());
      MatrixX s(a, a);
      VectorX rhs(a);
      for (int i = 0; i < a; ++i) {
        rhs(i) = slack(act[i]);
        for (int j = 0; j < a; ++j) s(i, j) = schur(act[i], act[j]);
      }
      const Eigen::LLT<MatrixX> sub(s);
      if (sub.info() != Eigen::Success) continue;
      const VectorX mult = sub.solve(rhs);
      bool dual_ok = true;
      for (int i = 0; i < a; ++i) {
        if (mult(i) < -1e-12 * (1.0 + std::abs(mult(i)))) dual_ok = false;
        lambda(act[i]) = std::max(0.0, mult(i));
      }
      if (!dual_ok) continue;
      for (int i = 0; i < a; ++i) u -= mult(i) * inv_rowsT.col(act[i]);
    }

    if (K.violation(u) > feas_tol) continue;
    if (multipliers_out) *multipliers_out = lambda;
    return u;
  }
  throw Error("active-set oracle found no KKT point; operator may be ill-conditioned");
}

}  // namespace viscontact
