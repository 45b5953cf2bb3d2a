#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "viscontact/errors.hpp"
#include "viscontact/material.hpp"
#include "viscontact/mesh.hpp"
#include "viscontact/time_integrator.hpp"
#include "viscontact/verification.hpp"

using namespace viscontact;

namespace {

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

}  // namespace

TEST_CASE("CheckReport::make: pass rule and table rendering") {
  CHECK(CheckReport::make("a", 1.0, 1.0, "").pass);
  CHECK(CheckReport::make("a", 1.0 + 1e-10, 1.0, "").pass);  // inside the slack
  CHECK(!CheckReport::make("a", 1.01, 1.0, "").pass);
  CHECK(!CheckReport::make("a", std::numeric_limits<double>::quiet_NaN(), 1.0, "").pass);
  CHECK(!CheckReport::make("a", std::numeric_limits<double>::infinity(), 1.0, "").pass);
  CHECK(CheckReport::make("a", -5.0, 0.0, "").pass);  // bound zero, negative measure

  const std::vector<CheckReport> reports = {
      CheckReport::make("short", 0.5, 1.0, "unused witness"),
      CheckReport::make("much_longer_name", 2.0, 1.0, "the culprit")};
  const std::string table = format_table(reports);
  CHECK(table.find("short") != std::string::npos);
  CHECK(table.find("much_longer_name") != std::string::npos);
  CHECK(table.find("pass") != std::string::npos);
  CHECK(table.find("FAIL") != std::string::npos);
  // Witnesses show up only for failures.
  CHECK(table.find("the culprit") != std::string::npos);
  CHECK(table.find("unused witness") == std::string::npos);
}

TEST_CASE("measure_contraction: frozen ratio arithmetic") {
  // Clean geometric decay: median ratio 0.5.
  const CheckReport geo = measure_contraction({1.0, 0.5, 0.25, 0.125});
  CHECK(geo.pass);
  CHECK(geo.measured == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(geo.bound == 1.0);

  // Converged before three sweeps: judged against the floor instead.
  const CheckReport early = measure_contraction({1e-14});
  CHECK(early.pass);
  CHECK(early.measured == 1e-14);
  CHECK(early.bound == 1e-10);

  // Two sweeps without convergence cannot certify anything.
  const CheckReport thin = measure_contraction({1.0, 0.9});
  CHECK(!thin.pass);
  CHECK(std::isinf(thin.measured));
  CHECK(thin.witness.find("insufficient residual history (2 sweeps)") != std::string::npos);
  CHECK(!measure_contraction({}).pass);

  // Diverging residuals: median ratio 2.
  const CheckReport div = measure_contraction({1.0, 2.0, 4.0, 8.0, 16.0});
  CHECK(!div.pass);
  CHECK(div.measured == doctest::Approx(2.0).epsilon(1e-15));

  // A rough start is forgiven: the median looks at the tail only.
  const CheckReport late = measure_contraction({1.0, 2.0, 0.5, 0.2, 0.08});
  CHECK(late.pass);
  CHECK(late.measured == doctest::Approx(0.4).epsilon(1e-12));

  // Exact zeros denote a dead iteration, which contracts trivially.
  CHECK(measure_contraction({1.0, 0.0, 0.0, 0.0}).pass);
}

TEST_CASE("fit_order: exact power data and input guards") {
  CHECK(fit_order({0.2, 0.1, 0.05}, {4e-2, 1e-2, 2.5e-3}) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(fit_order({0.2, 0.1}, {0.1, 0.05}) == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_WITH_AS(fit_order({0.1}, {0.01}),
                       "order fit needs matching dt/error lists of length >= 2", Error);
  CHECK_THROWS_WITH_AS(fit_order({0.1, 0.05}, {0.01, 0.0025, 0.001}),
                       "order fit needs matching dt/error lists of length >= 2", Error);
  CHECK_THROWS_WITH_AS(fit_order({0.1, 0.05}, {0.01, 0.0}),
                       "order fit needs positive dts and errors", Error);
  CHECK_THROWS_WITH_AS(fit_order({0.1, -0.05}, {0.01, 0.005}),
                       "order fit needs positive dts and errors", Error);
}

TEST_CASE("ellipticity and norm-equivalence certificates hold on the toy body") {
  const AssembledProblem problem(toy_spec(ViscoplasticLaw::zero(), 0.25, 0.5));

  const CheckReport mono = check_monotonicity(problem, 48, 7);
  CHECK(mono.pass);
  CHECK(mono.measured <= 1.0 + 1e-9);
  CHECK(mono.measured > 0.0);

  const CheckReport sharp = check_monotonicity_sharpness(problem);
  CHECK(sharp.pass);
  CHECK(sharp.measured <= 1e-6);

  const CheckReport norms = check_norm_equivalence(problem, 48, 8);
  CHECK(norms.pass);

  const CheckReport nsharp = check_norm_equivalence_sharpness(problem);
  CHECK(nsharp.pass);
  CHECK(nsharp.measured <= 1e-6);
}

TEST_CASE("sharpness checks refuse materials or meshes without a witness") {
  // lambda < 0 pushes the smallest Voigt eigenvalue off the shear axis, so
  // the (x2, 0) witness no longer attains it.
  ProblemSpec spec = toy_spec(ViscoplasticLaw::zero(), 0.25, 0.5);
  spec.elastic = ElasticTensor::from_lame(-0.5, 1.0);
  const AssembledProblem problem(std::move(spec));
  const CheckReport sharp = check_monotonicity_sharpness(problem);
  CHECK(!sharp.pass);
  CHECK(sharp.witness.find("no shear witness") != std::string::npos);

  // A clamp off the x2 = 0 line also invalidates the witness.
  Mesh2D mesh;
  mesh.nodes.resize(2, 3);
  mesh.nodes.col(0) = Vec2(0, 0);
  mesh.nodes.col(1) = Vec2(1, 0);
  mesh.nodes.col(2) = Vec2(0, 1);
  mesh.triangles.resize(3, 1);
  mesh.triangles.col(0) = Eigen::Vector3i(0, 1, 2);
  mesh.boundary_edges = {{0, 1, EdgeTag::Free}, {1, 2, EdgeTag::Fixed}, {2, 0, EdgeTag::Free}};
  ProblemSpec tilted;
  tilted.mesh = std::move(mesh);
  tilted.elastic = ElasticTensor::from_lame(1.0, 1.0);
  tilted.grid = TimeGrid::from_horizon(0.5, 0.5);
  const AssembledProblem tp(std::move(tilted));
  const CheckReport off = check_monotonicity_sharpness(tp);
  CHECK(!off.pass);
  CHECK(off.witness.find("not on x2 = 0") != std::string::npos);
}

TEST_CASE("history stability: constant formula and measured contraction") {
  CHECK(history_stability_constant(ElasticTensor::from_lame(1.0, 1.0)) == doctest::Approx(4.5));
  CHECK(history_stability_constant(ElasticTensor::isotropic(1.0, 0.0)) == doctest::Approx(4.0));

  const AssembledProblem problem(toy_spec(ViscoplasticLaw::zero(), 0.25, 0.5));
  const CheckReport stab = check_history_stability(problem, 0.0, 24, 11);
  CHECK(stab.pass);
  CHECK(stab.bound == doctest::Approx(4.5));
  CHECK(stab.measured > 0.0);
}

TEST_CASE("complementarity: clean trajectories pass, tampered ones name the defect") {
  const AssembledProblem problem(toy_spec(ViscoplasticLaw::zero(), 0.25, 0.5));
  const DiscreteState state = picard_solve(problem);

  const CheckReport clean = check_complementarity(problem, state, 1e-8);
  CHECK(clean.pass);

  // Push the first trajectory point through the gap.
  DiscreteState bent = state;
  const AdmissibleSet::Row& row = problem.admissible().row(0);
  bent.u[0][row.dof[0]] += 0.5 * row.coeff[0];  // move along the row direction
  const CheckReport gap = check_complementarity(problem, bent, 1e-8);
  CHECK(!gap.pass);
  CHECK(gap.witness.find("gap violation") != std::string::npos);

  // A negative pressure is flagged as a dual defect.
  DiscreteState sour = state;
  sour.multipliers[1](0) = -1.0;
  const CheckReport dual = check_complementarity(problem, sour, 1e-8);
  CHECK(!dual.pass);
  CHECK(dual.witness.find("negative multiplier") != std::string::npos);
}

TEST_CASE("convergence study: zero law is time-step independent") {
  ProblemSpec base = toy_spec(ViscoplasticLaw::zero(), 0.1, 0.4);
  base.config.scheme = Scheme::March;
  const ConvergenceStudy study = convergence_study(base, {0.1, 0.05, 0.025}, 0.0125);
  REQUIRE(study.errors.size() == 3);
  for (const double e : study.errors) CHECK(e <= 1e-9);

  CHECK_THROWS_WITH_AS(convergence_study(base, {0.1, 0.05}, 0.0125),
                       "convergence study needs at least 3 time steps", Error);
}

TEST_CASE("convergence study: trapezoid marching is second order on the toy flow") {
  ProblemSpec base = toy_spec(ViscoplasticLaw::linear_relaxation(0.8), 0.05, 0.25);
  base.config.scheme = Scheme::March;
  base.config.quadrature = Quadrature::Trapezoid;
  const ConvergenceStudy study = convergence_study(base, {0.05, 0.025, 0.0125}, 0.25 / 80.0);
  CHECK(study.monotone);
  const CheckReport order = check_convergence_order(study, 2.0, 0.5);
  CHECK(order.pass);
  CHECK(order.name == "order_2");

  // The same flow under the rectangle rule drops to first order.
  ProblemSpec rect = toy_spec(ViscoplasticLaw::linear_relaxation(0.8), 0.05, 0.25);
  rect.config.scheme = Scheme::March;
  rect.config.quadrature = Quadrature::Rectangle;
  const ConvergenceStudy rs = convergence_study(rect, {0.05, 0.025, 0.0125}, 0.25 / 80.0);
  const CheckReport ro = check_convergence_order(rs, 1.0, 0.5);
  CHECK(ro.pass);
  CHECK(ro.name == "order_1");
}
