#include "viscontact/verification.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "viscontact/errors.hpp"
#include "viscontact/random.hpp"

namespace viscontact {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace

CheckReport CheckReport::make(std::string name, double measured, double bound,
                              std::string witness) {
  CheckReport r;
  r.name = std::move(name);
  r.measured = measured;
  r.bound = bound;
  r.pass = std::isfinite(measured) && measured <= bound * (1.0 + 1e-9);
  r.witness = std::move(witness);
  return r;
}

std::string format_table(const std::vector<CheckReport>& reports) {
  std::ostringstream out;
  std::size_t width = 4;
  for (const CheckReport& r : reports) width = std::max(width, r.name.size());
  out << "  " << std::string(width - 4, ' ') << "name"
      << "  measured        bound           verdict\n";
  for (const CheckReport& r : reports) {
    char line[160];
    std::snprintf(line, sizeof(line), "  %*s  %-14.8g  %-14.8g  %s\n",
                  static_cast<int>(width), r.name.c_str(), r.measured, r.bound,
                  r.pass ? "pass" : "FAIL");
    out << line;
    if (!r.pass && !r.witness.empty()) out << "      " << r.witness << "\n";
  }
  return out.str();
}

CheckReport check_monotonicity(const AssembledProblem& problem, int samples,
                               std::uint64_t seed) {
  const double m_E = problem.spec().elastic.ellipticity_constant();
  Rng rng(seed);
  const int n = problem.dofs().free_dof_count();
  double min_ratio = std::numeric_limits<double>::infinity();
  int worst = -1;
  for (int s = 0; s < samples; ++s) {
    const VectorX u = rng.vector(n, -1.0, 1.0);
    const double vn = v_norm(problem.mesh(), problem.dofs(), u);
    if (vn == 0.0) continue;
    const double ratio = problem.stiffness().energy(u) / (vn * vn);
    if (ratio < min_ratio) {
      min_ratio = ratio;
      worst = s;
    }
  }
  return CheckReport::make(
      "monotonicity", m_E / min_ratio, 1.0,
      "min Rayleigh ratio " + fmt(min_ratio) + " vs m_E " + fmt(m_E) + " (sample " +
          std::to_string(worst) + ", seed " + std::to_string(seed) + ")");
}

namespace {

// Nodal interpolation of the shear field (x2, 0), the equality direction of
// the ellipticity bound. Valid as a member of V only when fixed nodes sit on
// x2 = 0; returns an empty vector otherwise.
VectorX shear_witness(const AssembledProblem& problem) {
  const Mesh2D& mesh = problem.mesh();
  const DofMap& dofs = problem.dofs();
  for (int n = 0; n < mesh.node_count(); ++n)
    if (dofs.is_fixed(n) && std::abs(mesh.nodes(1, n)) > 1e-14) return {};
  VectorX u = VectorX::Zero(dofs.free_dof_count());
  for (int n = 0; n < mesh.node_count(); ++n) {
    const int d = dofs.dof_of(n);
    if (d >= 0) u(d) = mesh.nodes(1, n);
  }
  return u;
}

double max_voigt_eigenvalue(const ElasticTensor& E) {
  Eigen::SelfAdjointEigenSolver<Mat3> eig(E.voigt(), Eigen::EigenvaluesOnly);
  return eig.eigenvalues().maxCoeff();
}

}  // namespace

CheckReport check_monotonicity_sharpness(const AssembledProblem& problem) {
  const ElasticTensor& E = problem.spec().elastic;
  const double m_E = E.ellipticity_constant();
  const double shear_eigen = E.voigt()(2, 2);
  if (std::abs(shear_eigen - m_E) > 1e-12 * m_E)
    return CheckReport::make("monotonicity_sharpness", 1.0, 0.0,
                             "no shear witness: the smallest Voigt eigenvalue is not the "
                             "shear one for this material");
  const VectorX u = shear_witness(problem);
  if (u.size() == 0)
    return CheckReport::make("monotonicity_sharpness", 1.0, 0.0,
                             "no shear witness: FIXED nodes are not on x2 = 0");
  const double vn = v_norm(problem.mesh(), problem.dofs(), u);
  const double ratio = problem.stiffness().energy(u) / (vn * vn);
  return CheckReport::make("monotonicity_sharpness", std::abs(ratio - m_E) / m_E, 1e-6,
                           "witness (x2, 0): ratio " + fmt(ratio) + " vs m_E " + fmt(m_E));
}

CheckReport check_norm_equivalence(const AssembledProblem& problem, int samples,
                                   std::uint64_t seed) {
  const ElasticTensor& E = problem.spec().elastic;
  const double lower = std::sqrt(E.ellipticity_constant());
  const double upper = std::sqrt(2.0 * E.sup_component_norm());
  Rng rng(seed);
  const int n = problem.dofs().free_dof_count();
  double worst = 0.0;
  double sharpest_low = std::numeric_limits<double>::infinity();
  double sharpest_high = 0.0;
  for (int s = 0; s < samples; ++s) {
    const VectorX u = rng.vector(n, -1.0, 1.0);
    const double vn = v_norm(problem.mesh(), problem.dofs(), u);
    if (vn == 0.0) continue;
    const double en = std::sqrt(problem.stiffness().energy(u));
    const double ratio = en / vn;
    sharpest_low = std::min(sharpest_low, ratio);
    sharpest_high = std::max(sharpest_high, ratio);
    worst = std::max(worst, std::max(lower * vn / en, en / (upper * vn)));
  }
  return CheckReport::make(
      "norm_equivalence", worst, 1.0,
      "ratio |v|_E/|v|_V ranged [" + fmt(sharpest_low) + ", " + fmt(sharpest_high) +
          "] inside [" + fmt(lower) + ", " + fmt(upper) + "] (seed " + std::to_string(seed) +
          ")");
}

CheckReport check_norm_equivalence_sharpness(const AssembledProblem& problem) {
  const ElasticTensor& E = problem.spec().elastic;
  const double lower = std::sqrt(E.ellipticity_constant());
  const double claimed_upper = std::sqrt(2.0 * E.sup_component_norm());
  const double attained_upper = std::sqrt(max_voigt_eigenvalue(E));

  double gap = 0.0;
  std::string note;

  // Lower constant: the shear field attains it on V when applicable.
  const double shear_eigen = E.voigt()(2, 2);
  const VectorX u = shear_witness(problem);
  if (u.size() > 0 && std::abs(shear_eigen - E.ellipticity_constant()) <
                          1e-12 * E.ellipticity_constant()) {
    const double vn = v_norm(problem.mesh(), problem.dofs(), u);
    const double ratio = std::sqrt(problem.stiffness().energy(u)) / vn;
    gap = std::max(gap, std::abs(ratio - lower) / lower);
    note += "shear witness ratio " + fmt(ratio) + " vs sqrt(m_E) " + fmt(lower);
  } else {
    return CheckReport::make("norm_equivalence_sharpness", 1.0, 0.0,
                             "no shear witness available for this problem");
  }

  // Largest attainable ratio: a constant top-eigenvector field, measured at
  // the tensor-field level since boundary conditions exclude it from V.
  Eigen::SelfAdjointEigenSolver<Mat3> eig(E.voigt());
  const Vec3 top = eig.eigenvectors().col(2);
  const TensorField field = top.replicate(1, problem.mesh().triangle_count());
  const double qn = q_norm(problem.mesh(), field);
  const double en = std::sqrt(q_inner(problem.mesh(), E.apply(field), field));
  const double top_ratio = en / qn;
  gap = std::max(gap, std::abs(top_ratio - attained_upper) / attained_upper);
  note += "; top-eigen field ratio " + fmt(top_ratio) + " vs sqrt(lambda_max) " +
          fmt(attained_upper) + " <= claimed " + fmt(claimed_upper);

  // The claimed constant must dominate the attainable one.
  if (attained_upper > claimed_upper * (1.0 + 1e-12))
    return CheckReport::make("norm_equivalence_sharpness", attained_upper, claimed_upper,
                             "claimed upper constant is below the attainable ratio");

  return CheckReport::make("norm_equivalence_sharpness", gap, 1e-6, note);
}

double history_stability_constant(const ElasticTensor& E) {
  const double m_E = E.ellipticity_constant();
  const double c1 = 1.0 / m_E;
  const double c2 = 2.0 * E.sup_component_norm() * c1 + 1.0;
  return c1 + c2;
}

CheckReport check_history_stability(const AssembledProblem& problem, double t, int samples,
                                    std::uint64_t seed) {
  const double C = history_stability_constant(problem.spec().elastic);
  const int m = problem.mesh().triangle_count();
  Rng rng(seed);
  double worst = 0.0;
  int worst_sample = -1;
  for (int s = 0; s < samples; ++s) {
    const TensorField eta1 = rng.tensor_field(m, -1.0, 1.0);
    const TensorField eta2 = rng.tensor_field(m, -1.0, 1.0);
    const double d_eta = q_norm(problem.mesh(), eta1 - eta2);
    if (d_eta == 0.0) continue;
    const auto s1 = problem.step_solve(eta1, t);
    const auto s2 = problem.step_solve(eta2, t, &s1.u);
    const double d_sigma = q_norm(problem.mesh(), s1.sigma - s2.sigma);
    const double d_eps = q_norm(problem.mesh(), s1.eps - s2.eps);
    const double ratio = (d_sigma + d_eps) / d_eta;
    if (ratio > worst) {
      worst = ratio;
      worst_sample = s;
    }
  }
  return CheckReport::make("history_stability", worst, C,
                           "worst ratio at sample " + std::to_string(worst_sample) +
                               " (seed " + std::to_string(seed) + ", " +
                               std::to_string(samples) + " pairs)");
}

CheckReport check_complementarity(const AssembledProblem& problem, const DiscreteState& state,
                                  double tol) {
  const AdmissibleSet& K = problem.admissible();
  double worst = 0.0;
  int worst_node = -1, worst_pair = -1;
  const char* worst_kind = "none";
  for (std::size_t j = 0; j < state.u.size(); ++j) {
    if (K.count() == 0) break;
    const VectorX r = K.residuals(state.u[j]);
    const VectorX& lambda = state.multipliers[j];
    for (int p = 0; p < K.count(); ++p) {
      const double feas = std::max(0.0, r(p));
      const double dual = std::max(0.0, -lambda(p));
      const double compl_product = std::abs(lambda(p) * r(p));
      const double local = std::max({feas, dual, compl_product});
      if (local > worst) {
        worst = local;
        worst_node = static_cast<int>(j);
        worst_pair = p;
        worst_kind = feas >= dual && feas >= compl_product ? "gap violation"
                     : dual >= compl_product               ? "negative multiplier"
                                                           : "complementarity product";
      }
    }
  }
  std::string witness = "all residuals zero";
  if (worst_node >= 0)
    witness = std::string(worst_kind) + " at node " + std::to_string(worst_node) + ", pair " +
              std::to_string(worst_pair) +
              "; tangential force is zero by construction (normal-only rows)";
  return CheckReport::make("complementarity", worst, tol, witness);
}

CheckReport measure_contraction(const std::vector<double>& residuals, double floor) {
  if (residuals.size() < 3) {
    if (!residuals.empty() && residuals.back() <= floor)
      return CheckReport::make("contraction", residuals.back(), floor,
                               "converged before three sweeps");
    return CheckReport::make("contraction", std::numeric_limits<double>::infinity(), floor,
                             "insufficient residual history (" +
                                 std::to_string(residuals.size()) + " sweeps)");
  }
  std::vector<double> ratios;
  for (std::size_t i = 0; i + 1 < residuals.size(); ++i)
    ratios.push_back(residuals[i] > 0.0 ? residuals[i + 1] / residuals[i] : 0.0);

  const std::size_t tail =
      std::max<std::size_t>(3, (ratios.size() + 1) / 2);
  std::vector<double> window(ratios.end() - std::min(tail, ratios.size()), ratios.end());
  std::sort(window.begin(), window.end());
  const std::size_t mid = window.size() / 2;
  const double median = window.size() % 2 == 1
                            ? window[mid]
                            : 0.5 * (window[mid - 1] + window[mid]);
  return CheckReport::make("contraction", median, 1.0,
                           "median of last " + std::to_string(window.size()) +
                               " residual ratios over " + std::to_string(residuals.size()) +
                               " sweeps");
}

double fit_order(const std::vector<double>& dts, const std::vector<double>& errors) {
  if (dts.size() != errors.size() || dts.size() < 2)
    throw Error("order fit needs matching dt/error lists of length >= 2");
  double sx = 0.0, sy = 0.0;
  const int n = static_cast<int>(dts.size());
  std::vector<double> x(n), y(n);
  for (int i = 0; i < n; ++i) {
    if (dts[i] <= 0.0 || errors[i] <= 0.0) throw Error("order fit needs positive dts and errors");
    x[i] = std::log(dts[i]);
    y[i] = std::log(errors[i]);
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double num = 0.0, den = 0.0;
  for (int i = 0; i < n; ++i) {
    num += (x[i] - mx) * (y[i] - my);
    den += (x[i] - mx) * (x[i] - mx);
  }
  return num / den;
}

ConvergenceStudy convergence_study(const ProblemSpec& base, const std::vector<double>& dts,
                                   double dt_ref) {
  if (dts.size() < 3) throw Error("convergence study needs at least 3 time steps");
  const double T = base.grid.horizon();

  ProblemSpec ref_spec = base;
  ref_spec.grid = TimeGrid::from_horizon(dt_ref, T);
  const AssembledProblem ref_problem(ref_spec);
  const DiscreteState ref = solve(ref_problem);

  ConvergenceStudy study;
  study.dts = dts;
  for (const double dt : dts) {
    ProblemSpec spec = base;
    spec.grid = TimeGrid::from_horizon(dt, T);
    const AssembledProblem problem(spec);
    const DiscreteState state = solve(problem);
    study.errors.push_back(
        v_norm(base.mesh, problem.dofs(), state.u.back() - ref.u.back()));
  }

  study.monotone = true;
  for (std::size_t i = 0; i + 1 < study.errors.size(); ++i)
    if (study.errors[i + 1] >= study.errors[i]) study.monotone = false;
  bool positive = true;
  for (const double e : study.errors) positive = positive && e > 0.0;
  study.order = positive ? fit_order(study.dts, study.errors) : 0.0;
  return study;
}

CheckReport check_convergence_order(const ConvergenceStudy& study, double expected_order,
                                    double band) {
  std::string witness = "fitted order " + fmt(study.order) + " from errors (";
  for (std::size_t i = 0; i < study.errors.size(); ++i)
    witness += (i ? ", " : "") + fmt(study.errors[i]);
  witness += ")";
  if (!study.monotone) witness += "; errors not monotone";
  return CheckReport::make("order_" + fmt(expected_order), std::abs(study.order - expected_order),
                           band, witness);
}

namespace {

ProblemSpec verify_toy_spec() {
  ProblemSpec spec;
  spec.mesh = build_notched_rectangle(2.0, 1.0, 0.5, 1.5, 0.5, 0.01, 12);
  spec.elastic = ElasticTensor::from_lame(1.0, 1.0);
  spec.law = ViscoplasticLaw::linear_relaxation(0.5);
  spec.load.traction = Vec2(0.0, -0.3);
  // A nonzero initial stress keeps the history genuinely time-dependent
  // (with the relaxation law G = -kappa eta, so eta decays from this value).
  spec.sigma0 = Vec3(0.2, -0.1, 0.05).replicate(1, spec.mesh.triangle_count());
  spec.grid = TimeGrid::from_horizon(0.05, 0.5);
  spec.config.vi_tol = 1e-11;
  spec.config.vi_max_iters = 400000;
  spec.config.fp_tol = 1e-11;
  return spec;
}

}  // namespace

std::vector<CheckReport> run_verify_suite(std::uint64_t seed) {
  std::vector<CheckReport> reports;
  const ProblemSpec toy = verify_toy_spec();
  const AssembledProblem problem(toy);

  reports.push_back(check_monotonicity(problem, 64, seed));
  reports.push_back(check_monotonicity_sharpness(problem));
  reports.push_back(check_norm_equivalence(problem, 64, seed + 1));
  reports.push_back(check_norm_equivalence_sharpness(problem));
  reports.push_back(check_history_stability(problem, 0.0, 32, seed + 2));

  const DiscreteState state = picard_solve(problem);
  reports.push_back(check_complementarity(problem, state, 1e-8));
  reports.push_back(measure_contraction(state.fp_residuals, toy.config.fp_tol));

  ProblemSpec study_spec = toy;
  study_spec.config.scheme = Scheme::March;
  const std::vector<double> dts = {1.0 / 8, 1.0 / 16, 1.0 / 32};
  study_spec.config.quadrature = Quadrature::Trapezoid;
  reports.push_back(
      check_convergence_order(convergence_study(study_spec, dts, 1.0 / 128), 2.0, 0.3));
  study_spec.config.quadrature = Quadrature::Rectangle;
  reports.push_back(
      check_convergence_order(convergence_study(study_spec, dts, 1.0 / 128), 1.0, 0.3));

  return reports;
}

}  // namespace viscontact
