#include "viscontact/time_integrator.hpp"

#include <cmath>
#include <utility>

#include "viscontact/errors.hpp"
#include "viscontact/parallel.hpp"

namespace viscontact {

TimeGrid TimeGrid::from_horizon(double dt, double T) {
  if (dt <= 0.0) throw Error("time step must be positive");
  if (T < dt) throw Error("horizon shorter than one time step");
  TimeGrid grid;
  grid.dt = dt;
  grid.steps = static_cast<int>(std::lround(T / dt));
  if (std::abs(grid.steps * dt - T) > 1e-9 * std::max(1.0, T))
    throw Error("horizon is not an integer multiple of the time step");
  return grid;
}

namespace {

ConstraintSet make_pairs(const ProblemSpec& spec) {
  ConstraintSet set = match_contact_pairs(spec.mesh, spec.contact_match_tol);
  if (spec.contact_gap_override >= 0.0)
    for (ContactPair& p : set.pairs) p.gap = spec.contact_gap_override;
  return set;
}

}  // namespace

AssembledProblem::AssembledProblem(ProblemSpec spec)
    : spec_(std::move(spec)),
      dofs_(spec_.mesh),
      strain_(spec_.mesh, dofs_),
      stiffness_(spec_.mesh, dofs_, spec_.elastic),
      pairs_(make_pairs(spec_)),
      admissible_(pairs_, dofs_) {
  const int m = spec_.mesh.triangle_count();

  if (spec_.u0.size() == 0) spec_.u0 = VectorX::Zero(dofs_.free_dof_count());
  if (spec_.u0.size() != dofs_.free_dof_count())
    throw Error("initial displacement has wrong length");
  if (spec_.sigma0.size() == 0) spec_.sigma0 = TensorField::Zero(3, m);
  if (spec_.sigma0.cols() != m) throw Error("initial stress field has wrong column count");

  offset_ = spec_.sigma0 - spec_.elastic.apply(strain_.apply(spec_.u0));
}

VectorX AssembledProblem::force(double t) const {
  return assemble_force(spec_.mesh, dofs_, spec_.load, t);
}

AssembledProblem::Step AssembledProblem::step_solve(const TensorField& eta, double t,
                                                    const VectorX* warm_start) const {
  const VectorX b = force(t) - strain_.apply_adjoint(eta);
  VIResult vi = solve_vi(stiffness_, b, admissible_, spec_.config, warm_start);
  Step step;
  step.eps = strain_.apply(vi.u);
  step.sigma = spec_.elastic.apply(step.eps) + eta;
  step.u = std::move(vi.u);
  step.multipliers = std::move(vi.multipliers);
  step.iterations = vi.iterations;
  return step;
}

TensorField integrate_history(const std::vector<TensorField>& g_values,
                              const TensorField& offset, double dt, Quadrature rule, int j) {
  if (j < 0 || j >= static_cast<int>(g_values.size()))
    throw Error("history index outside the sampled range");
  TensorField eta = offset;
  for (int s = 0; s < j; ++s) {
    if (rule == Quadrature::Rectangle)
      eta += dt * g_values[s];
    else
      eta += 0.5 * dt * (g_values[s] + g_values[s + 1]);
  }
  return eta;
}

namespace {

struct SweepResult {
  std::vector<AssembledProblem::Step> steps;
  std::vector<TensorField> g;  // law values G(sigma_j, eps_j)
};

// Solves every time node against the current history iterate. Node problems
// are independent, so the sweep parallelizes without changing any result.
SweepResult sweep(const AssembledProblem& problem, const std::vector<TensorField>& eta,
                  const std::vector<VectorX>& warm) {
  const TimeGrid& grid = problem.spec().grid;
  const int nodes = grid.node_count();
  SweepResult out;
  out.steps.resize(nodes);
  out.g.resize(nodes);
  parallel_for(nodes, problem.spec().config.threads, [&](int j) {
    const VectorX* start = (j < static_cast<int>(warm.size()) && warm[j].size() > 0)
                               ? &warm[j]
                               : nullptr;
    out.steps[j] = problem.step_solve(eta[j], grid.time(j), start);
    out.g[j] = problem.spec().law.evaluate(problem.spec().elastic, out.steps[j].sigma,
                                           out.steps[j].eps);
  });
  return out;
}

// Prefix accumulation matching integrate_history term for term.
std::vector<TensorField> rebuild_history(const std::vector<TensorField>& g,
                                         const TensorField& offset, double dt,
                                         Quadrature rule) {
  std::vector<TensorField> eta(g.size());
  TensorField run = offset;
  eta[0] = run;
  for (std::size_t j = 1; j < g.size(); ++j) {
    if (rule == Quadrature::Rectangle)
      run += dt * g[j - 1];
    else
      run += 0.5 * dt * (g[j - 1] + g[j]);
    eta[j] = run;
  }
  return eta;
}

void fill_state(DiscreteState& state, const AssembledProblem& problem,
                std::vector<AssembledProblem::Step>& steps, std::vector<TensorField> eta) {
  const int nodes = problem.spec().grid.node_count();
  state.grid = problem.spec().grid;
  state.u.resize(nodes);
  state.sigma.resize(nodes);
  state.eta = std::move(eta);
  state.multipliers.resize(nodes);
  state.vi_iterations.resize(nodes);
  for (int j = 0; j < nodes; ++j) {
    state.u[j] = std::move(steps[j].u);
    state.sigma[j] = std::move(steps[j].sigma);
    state.multipliers[j] = std::move(steps[j].multipliers);
    state.vi_iterations[j] = steps[j].iterations;
  }
}

}  // namespace

DiscreteState picard_solve(const AssembledProblem& problem,
                           const std::vector<TensorField>* eta0) {
  const ProblemSpec& spec = problem.spec();
  const int nodes = spec.grid.node_count();

  std::vector<TensorField> eta;
  if (eta0) {
    if (static_cast<int>(eta0->size()) != nodes)
      throw Error("history override has wrong node count");
    eta = *eta0;
  } else {
    eta.assign(nodes, problem.history_offset());
  }

  std::vector<VectorX> warm(nodes);
  DiscreteState state;
  bool converged = false;
  for (int k = 1; k <= spec.config.fp_max_iters; ++k) {
    SweepResult swept = sweep(problem, eta, warm);
    std::vector<TensorField> next =
        rebuild_history(swept.g, problem.history_offset(), spec.grid.dt, spec.config.quadrature);

    double residual = 0.0;
    for (int j = 0; j < nodes; ++j)
      residual = std::max(residual, q_norm(spec.mesh, next[j] - eta[j]));
    state.fp_residuals.push_back(residual);
    state.sweeps = k;

    eta = std::move(next);
    for (int j = 0; j < nodes; ++j) warm[j] = std::move(swept.steps[j].u);
    if (residual <= spec.config.fp_tol) {
      converged = true;
      break;
    }
  }
  if (!converged)
    throw NonconvergenceError("history fixed point did not converge in " +
                                  std::to_string(spec.config.fp_max_iters) + " sweeps",
                              state.fp_residuals.back(), state.fp_residuals);

  // One more sweep against the converged history makes the stored triple
  // exactly consistent: sigma_j = E eps(u_j) + eta_j with this eta.
  SweepResult final_sweep = sweep(problem, eta, warm);
  fill_state(state, problem, final_sweep.steps, std::move(eta));
  state.fp_iterations.assign(nodes, state.sweeps);
  return state;
}

DiscreteState march_solve(const AssembledProblem& problem) {
  const ProblemSpec& spec = problem.spec();
  const TimeGrid& grid = spec.grid;
  const int nodes = grid.node_count();
  const bool explicit_rule = spec.config.quadrature == Quadrature::Rectangle;

  std::vector<AssembledProblem::Step> steps(nodes);
  std::vector<TensorField> eta(nodes);
  std::vector<TensorField> g(nodes);
  DiscreteState state;
  state.fp_residuals.assign(nodes, 0.0);
  state.fp_iterations.assign(nodes, 0);

  eta[0] = problem.history_offset();
  steps[0] = problem.step_solve(eta[0], 0.0);
  g[0] = spec.law.evaluate(spec.elastic, steps[0].sigma, steps[0].eps);

  for (int j = 1; j < nodes; ++j) {
    const double t = grid.time(j);
    const VectorX* warm = &steps[j - 1].u;
    if (explicit_rule) {
      eta[j] = eta[j - 1] + grid.dt * g[j - 1];
      steps[j] = problem.step_solve(eta[j], t, warm);
    } else {
      // Trapezoid couples eta_j to the unknown u_j; iterate on eta_j
      // starting from the explicit predictor.
      TensorField guess = eta[j - 1] + grid.dt * g[j - 1];
      bool settled = false;
      for (int m = 1; m <= spec.config.fp_max_iters; ++m) {
        steps[j] = problem.step_solve(guess, t, warm);
        const TensorField gj = spec.law.evaluate(spec.elastic, steps[j].sigma, steps[j].eps);
        TensorField next = eta[j - 1] + 0.5 * grid.dt * (g[j - 1] + gj);
        const double residual = q_norm(spec.mesh, next - guess);
        guess = std::move(next);
        warm = &steps[j].u;
        state.fp_residuals[j] = residual;
        state.fp_iterations[j] = m;
        if (residual <= spec.config.fp_tol) {
          settled = true;
          break;
        }
      }
      if (!settled)
        throw NonconvergenceError("inner fixed point stalled at node " + std::to_string(j),
                                  state.fp_residuals[j], state.fp_residuals);
      eta[j] = guess;
      // Final solve against the settled eta keeps the stored triple exact.
      steps[j] = problem.step_solve(eta[j], t, warm);
    }
    g[j] = spec.law.evaluate(spec.elastic, steps[j].sigma, steps[j].eps);
    state.sweeps = std::max(state.sweeps, state.fp_iterations[j]);
  }

  fill_state(state, problem, steps, std::move(eta));
  return state;
}

DiscreteState solve(const AssembledProblem& problem) {
  return problem.spec().config.scheme == Scheme::Picard ? picard_solve(problem)
                                                        : march_solve(problem);
}

}  // namespace viscontact
