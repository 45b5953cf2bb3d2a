#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "viscontact/assembly.hpp"
#include "viscontact/errors.hpp"
#include "viscontact/material.hpp"
#include "viscontact/mesh.hpp"
#include "viscontact/random.hpp"
#include "viscontact/time_integrator.hpp"

using namespace viscontact;

namespace {

// Small notched body under constant downward traction. Initial stress keeps
// the relaxation law moving; without it the history would be identically
// zero and the time axis invisible.
ProblemSpec toy_spec(ViscoplasticLaw law, double dt, double T) {
  ProblemSpec spec;
  spec.mesh = build_notched_rectangle(2.0, 1.0, 0.5, 1.5, 0.5, 0.01, 6);
  spec.elastic = ElasticTensor::from_lame(1.0, 1.0);
  spec.law = law;
  spec.load.traction = Vec2(0.0, -0.3);
  spec.sigma0 = Vec3(0.2, -0.1, 0.05).replicate(1, spec.mesh.triangle_count());
  spec.grid = TimeGrid::from_horizon(dt, T);
  spec.config.vi_tol = 1e-12;
  spec.config.vi_max_iters = 2000000;
  spec.config.fp_tol = 1e-11;
  return spec;
}

double max_state_gap(const Mesh2D& mesh, const DofMap& dofs, const DiscreteState& a,
                     const DiscreteState& b) {
  double worst = 0.0;
  for (std::size_t j = 0; j < a.u.size(); ++j)
    worst = std::max(worst, v_norm(mesh, dofs, a.u[j] - b.u[j]));
  return worst;
}

}  // namespace

TEST_CASE("TimeGrid: horizon factoring and validation") {
  const TimeGrid grid = TimeGrid::from_horizon(0.1, 0.5);
  CHECK(grid.steps == 5);
  CHECK(grid.dt == 0.1);
  CHECK(grid.node_count() == 6);
  CHECK(grid.horizon() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(grid.time(3) == doctest::Approx(0.3).epsilon(1e-15));

  // A third works despite 1/3 being inexact in binary.
  CHECK(TimeGrid::from_horizon(1.0 / 3.0, 1.0).steps == 3);

  CHECK_THROWS_WITH_AS(TimeGrid::from_horizon(0.0, 1.0), "time step must be positive", Error);
  CHECK_THROWS_WITH_AS(TimeGrid::from_horizon(-0.1, 1.0), "time step must be positive", Error);
  CHECK_THROWS_WITH_AS(TimeGrid::from_horizon(0.5, 0.3), "horizon shorter than one time step",
                       Error);
  CHECK_THROWS_WITH_AS(TimeGrid::from_horizon(0.3, 1.0),
                       "horizon is not an integer multiple of the time step", Error);
}

TEST_CASE("integrate_history: rectangle and trapezoid rules by hand") {
  const TensorField offset = Vec3(1.0, 2.0, 3.0);
  const double dt = 0.1;

  // Linear samples g_s = s * h.
  const Vec3 h(0.4, -0.2, 0.1);
  std::vector<TensorField> g;
  for (int s = 0; s < 4; ++s) g.push_back(TensorField(s * h));

  // j = 0 is the bare offset under both rules.
  CHECK((integrate_history(g, offset, dt, Quadrature::Rectangle, 0) - offset).norm() == 0.0);
  CHECK((integrate_history(g, offset, dt, Quadrature::Trapezoid, 0) - offset).norm() == 0.0);

  // Left sums lag by one sample; trapezoid integrates linear data exactly.
  const TensorField rect2 = integrate_history(g, offset, dt, Quadrature::Rectangle, 2);
  CHECK((rect2 - (offset + TensorField(0.1 * h))).cwiseAbs().maxCoeff() <= 1e-15);
  const TensorField trap2 = integrate_history(g, offset, dt, Quadrature::Trapezoid, 2);
  CHECK((trap2 - (offset + TensorField(0.2 * h))).cwiseAbs().maxCoeff() <= 1e-15);

  // Constant samples integrate identically under both rules.
  std::vector<TensorField> c(4, TensorField(Vec3(1.0, 1.0, 0.0)));
  const TensorField rc = integrate_history(c, offset, dt, Quadrature::Rectangle, 3);
  const TensorField tc = integrate_history(c, offset, dt, Quadrature::Trapezoid, 3);
  CHECK((rc - tc).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK(rc(0, 0) == doctest::Approx(1.0 + 0.3).epsilon(1e-14));

  CHECK_THROWS_WITH_AS(integrate_history(g, offset, dt, Quadrature::Rectangle, 4),
                       "history index outside the sampled range", Error);
  CHECK_THROWS_WITH_AS(integrate_history(g, offset, dt, Quadrature::Trapezoid, -1),
                       "history index outside the sampled range", Error);
}

TEST_CASE("AssembledProblem: shapes, offset arithmetic, initial-data checks") {
  ProblemSpec spec = toy_spec(ViscoplasticLaw::zero(), 0.25, 0.5);
  const int m = spec.mesh.triangle_count();
  REQUIRE(m == 36);

  SUBCASE("defaults: zero initial data leaves no offset") {
    spec.sigma0 = TensorField();
    const AssembledProblem problem(std::move(spec));
    CHECK(problem.dofs().free_dof_count() == 46);
    CHECK(problem.pairs().count() == 2);
    CHECK(problem.history_offset().cols() == m);
    CHECK(problem.history_offset().norm() == 0.0);
  }

  SUBCASE("offset is sigma0 - E eps(u0)") {
    Rng rng(5);
    const Mesh2D mesh = spec.mesh;  // the spec is consumed below
    spec.u0 = rng.vector(46, -0.05, 0.05);
    spec.sigma0 = rng.tensor_field(m, -1.0, 1.0);
    const TensorField sigma0 = spec.sigma0;
    const VectorX u0 = spec.u0;
    const AssembledProblem problem(std::move(spec));
    const TensorField expect =
        sigma0 - problem.spec().elastic.apply(strain(mesh, problem.dofs(), u0));
    CHECK((problem.history_offset() - expect).cwiseAbs().maxCoeff() <= 1e-14);
  }

  SUBCASE("wrong-size initial data is refused") {
    spec.u0 = VectorX::Zero(3);
    CHECK_THROWS_WITH_AS(AssembledProblem(std::move(spec)), "initial displacement has wrong length",
                         Error);
    ProblemSpec spec2 = toy_spec(ViscoplasticLaw::zero(), 0.25, 0.5);
    spec2.sigma0 = TensorField::Zero(3, 5);
    CHECK_THROWS_WITH_AS(AssembledProblem(std::move(spec2)),
                         "initial stress field has wrong column count", Error);
  }

  SUBCASE("gap override replaces every geometric gap") {
    spec.contact_gap_override = 0.004;
    const AssembledProblem problem(std::move(spec));
    for (int p = 0; p < problem.pairs().count(); ++p) {
      CHECK(problem.pairs().pairs[p].gap == 0.004);
      CHECK(problem.admissible().row(p).gap == 0.004);
    }
  }

  SUBCASE("step_solve recovers stress exactly from the history term") {
    const AssembledProblem problem(std::move(spec));
    Rng rng(9);
    const TensorField eta = rng.tensor_field(m, -0.2, 0.2);
    const AssembledProblem::Step step = problem.step_solve(eta, 0.0);
    CHECK(step.u.size() == 46);
    CHECK(step.multipliers.size() == 2);
    CHECK(step.iterations > 0);
    const TensorField recon = problem.spec().elastic.apply(step.eps) + eta;
    CHECK((step.sigma - recon).cwiseAbs().maxCoeff() <= 1e-14);
    CHECK((step.eps - strain(problem.mesh(), problem.dofs(), step.u)).cwiseAbs().maxCoeff() <=
          1e-14);
  }
}

TEST_CASE("zero law: one sweep, frozen history, steady trajectory") {
  ProblemSpec spec = toy_spec(ViscoplasticLaw::zero(), 0.25, 0.5);
  spec.sigma0 = TensorField();  // no offset: eta stays identically zero
  const AssembledProblem problem(std::move(spec));

  const DiscreteState state = picard_solve(problem);
  CHECK(state.sweeps == 1);
  REQUIRE(state.fp_residuals.size() == 1);
  CHECK(state.fp_residuals[0] == 0.0);
  REQUIRE(state.u.size() == 3);
  for (int j = 0; j < 3; ++j) {
    CHECK(state.eta[j].norm() == 0.0);
    CHECK(state.fp_iterations[j] == 1);
    CHECK(state.vi_iterations[j] > 0);
    CHECK(state.multipliers[j].size() == 2);
    // Constant load, no history: every node solves the same inequality.
    CHECK(v_norm(problem.mesh(), problem.dofs(), state.u[j] - state.u[0]) <= 1e-9);
  }

  // Marching with the explicit rule never iterates.
  ProblemSpec mspec = toy_spec(ViscoplasticLaw::zero(), 0.25, 0.5);
  mspec.sigma0 = TensorField();
  mspec.config.quadrature = Quadrature::Rectangle;
  mspec.config.scheme = Scheme::March;
  const AssembledProblem mproblem(std::move(mspec));
  const DiscreteState march = solve(mproblem);  // dispatches to march_solve
  for (int j = 0; j < 3; ++j) {
    CHECK(march.fp_iterations[j] == 0);
    CHECK(march.fp_residuals[j] == 0.0);
  }
  CHECK(max_state_gap(problem.mesh(), problem.dofs(), state, march) <= 1e-9);
}

TEST_CASE("linear relaxation: discrete history follows the closed-form decay") {
  // With G = -kappa eta the history recursion closes over eta alone:
  //   rectangle:  eta_j = (1 - kappa dt) eta_{j-1}
  //   trapezoid:  eta_j = (1 - kappa dt / 2) / (1 + kappa dt / 2) eta_{j-1}
  // independent of the displacement solves.
  const double kappa = 0.8, dt = 0.1, T = 0.5;
  const Vec3 c(0.2, -0.1, 0.05);

  struct Rule {
    Quadrature quad;
    double ratio;
  };
  for (const Rule rule : {Rule{Quadrature::Rectangle, 1.0 - kappa * dt},
                          Rule{Quadrature::Trapezoid,
                               (1.0 - 0.5 * kappa * dt) / (1.0 + 0.5 * kappa * dt)}}) {
    for (const Scheme scheme : {Scheme::Picard, Scheme::March}) {
      ProblemSpec spec = toy_spec(ViscoplasticLaw::linear_relaxation(kappa), dt, T);
      spec.config.quadrature = rule.quad;
      spec.config.scheme = scheme;
      const AssembledProblem problem(std::move(spec));
      const DiscreteState state = solve(problem);

      REQUIRE(state.u.size() == 6);
      double factor = 1.0;
      for (int j = 0; j < 6; ++j) {
        const TensorField expect = (factor * c).replicate(1, 36);
        CHECK((state.eta[j] - expect).cwiseAbs().maxCoeff() <= 1e-9);
        factor *= rule.ratio;

        // The stored triple satisfies sigma = E eps(u) + eta exactly.
        const TensorField eps = strain(problem.mesh(), problem.dofs(), state.u[j]);
        const TensorField recon = problem.spec().elastic.apply(eps) + state.eta[j];
        CHECK((state.sigma[j] - recon).cwiseAbs().maxCoeff() <= 1e-13);
      }
    }
  }
}

TEST_CASE("linear relaxation: picard and march meet at the same fixed point") {
  for (const Quadrature quad : {Quadrature::Trapezoid, Quadrature::Rectangle}) {
    ProblemSpec pspec = toy_spec(ViscoplasticLaw::linear_relaxation(0.8), 0.1, 0.5);
    pspec.config.quadrature = quad;
    const AssembledProblem pp(std::move(pspec));
    const DiscreteState picard = picard_solve(pp);

    ProblemSpec mspec = toy_spec(ViscoplasticLaw::linear_relaxation(0.8), 0.1, 0.5);
    mspec.config.quadrature = quad;
    const AssembledProblem mp(std::move(mspec));
    const DiscreteState march = march_solve(mp);

    CHECK(max_state_gap(pp.mesh(), pp.dofs(), picard, march) <= 1e-9);
    for (int j = 0; j < 6; ++j)
      CHECK((picard.eta[j] - march.eta[j]).cwiseAbs().maxCoeff() <= 1e-9);
  }

  // Sweep accounting: picard charges every node the sweep count, marching
  // with the trapezoid rule reports per-node inner iterations.
  ProblemSpec pspec = toy_spec(ViscoplasticLaw::linear_relaxation(0.8), 0.1, 0.5);
  const AssembledProblem pp(std::move(pspec));
  const DiscreteState picard = picard_solve(pp);
  CHECK(picard.sweeps > 1);
  for (int j = 0; j < 6; ++j) CHECK(picard.fp_iterations[j] == picard.sweeps);
  CHECK(static_cast<int>(picard.fp_residuals.size()) == picard.sweeps);
  CHECK(picard.fp_residuals.back() <= 1e-11);

  ProblemSpec mspec = toy_spec(ViscoplasticLaw::linear_relaxation(0.8), 0.1, 0.5);
  const AssembledProblem mp(std::move(mspec));
  const DiscreteState march = march_solve(mp);
  CHECK(march.fp_iterations[0] == 0);  // node 0 is never iterated
  int deepest = 0;
  for (int j = 1; j < 6; ++j) {
    CHECK(march.fp_iterations[j] >= 1);
    CHECK(march.fp_residuals[j] <= 1e-11);
    deepest = std::max(deepest, march.fp_iterations[j]);
  }
  CHECK(march.sweeps == deepest);
}

TEST_CASE("picard: history override changes the path, not the fixed point") {
  ProblemSpec spec = toy_spec(ViscoplasticLaw::linear_relaxation(0.8), 0.1, 0.5);
  const AssembledProblem problem(std::move(spec));
  const DiscreteState base = picard_solve(problem);

  Rng rng(31);
  std::vector<TensorField> eta0(6);
  for (int j = 0; j < 6; ++j)
    eta0[j] = problem.history_offset() + 0.05 * rng.tensor_field(36, -1.0, 1.0);
  const DiscreteState bent = picard_solve(problem, &eta0);
  CHECK(max_state_gap(problem.mesh(), problem.dofs(), base, bent) <= 1e-9);
  for (int j = 0; j < 6; ++j)
    CHECK((base.eta[j] - bent.eta[j]).cwiseAbs().maxCoeff() <= 1e-9);

  std::vector<TensorField> wrong(2, problem.history_offset());
  CHECK_THROWS_WITH_AS(picard_solve(problem, &wrong), "history override has wrong node count",
                       Error);
}

TEST_CASE("nonconvergence surfaces as typed errors with residual history") {
  // kappa dt / 2 = 1.5: the inner trapezoid map is expansive.
  ProblemSpec mspec = toy_spec(ViscoplasticLaw::linear_relaxation(30.0), 0.1, 0.3);
  mspec.config.fp_max_iters = 25;
  const AssembledProblem mp(std::move(mspec));
  try {
    march_solve(mp);
    FAIL("expected NonconvergenceError");
  } catch (const NonconvergenceError& e) {
    CHECK(std::string(e.what()).find("inner fixed point stalled at node") != std::string::npos);
    CHECK(e.residual > 0.0);
    CHECK(!e.history.empty());
  }

  ProblemSpec pspec = toy_spec(ViscoplasticLaw::linear_relaxation(30.0), 0.1, 0.3);
  pspec.config.fp_max_iters = 3;
  const AssembledProblem pp(std::move(pspec));
  try {
    picard_solve(pp);
    FAIL("expected NonconvergenceError");
  } catch (const NonconvergenceError& e) {
    CHECK(std::string(e.what()) == "history fixed point did not converge in 3 sweeps");
    CHECK(e.history.size() == 3);
    CHECK(e.residual == e.history.back());
  }
}

TEST_CASE("truncated Perzyna: trace-preserving history, both schemes agree") {
  ProblemSpec pspec = toy_spec(ViscoplasticLaw::truncated_perzyna(0.5, 0.05), 0.1, 0.5);
  const AssembledProblem pp(std::move(pspec));
  const DiscreteState picard = picard_solve(pp);

  ProblemSpec mspec = toy_spec(ViscoplasticLaw::truncated_perzyna(0.5, 0.05), 0.1, 0.5);
  const AssembledProblem mp(std::move(mspec));
  const DiscreteState march = march_solve(mp);

  CHECK(max_state_gap(pp.mesh(), pp.dofs(), picard, march) <= 1e-9);

  // G is deviatoric, so integration never moves the trace of the history
  // away from the offset's.
  const TensorField& offset = pp.history_offset();
  for (int j = 0; j < 6; ++j)
    for (int t = 0; t < 36; ++t)
      CHECK(packed_trace(picard.eta[j].col(t)) ==
            doctest::Approx(packed_trace(offset.col(t))).epsilon(1e-10));

  // The history genuinely moved somewhere (the initial stress exceeds the
  // tiny yield radius).
  CHECK((picard.eta[5] - picard.eta[0]).cwiseAbs().maxCoeff() > 1e-4);
}
