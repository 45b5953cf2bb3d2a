#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "viscontact/time_integrator.hpp"

namespace viscontact {

/// One certified inequality. Claims are oriented so that passing means
/// measured <= bound (1 + 1e-9): upper-bound checks report the raw worst
/// value against the raw bound, lower-bound checks report the ratio
/// claimed/observed against 1. The witness records the inputs and raw
/// numbers behind the worst case.
struct CheckReport {
  std::string name;
  double measured = 0.0;
  double bound = 0.0;
  bool pass = false;
  std::string witness;

  static CheckReport make(std::string name, double measured, double bound,
                          std::string witness);
};

std::string format_table(const std::vector<CheckReport>& reports);

/// Worst (smallest) Rayleigh ratio (u . Au) / v_norm(u)^2 over random free
/// vectors, plus the traceless-strain witness that attains the ellipticity
/// constant. Reported as claimed/observed vs 1.
CheckReport check_monotonicity(const AssembledProblem& problem, int samples, std::uint64_t seed);

/// Verifies sqrt(m_E) |v|_V <= |v|_E <= sqrt(d sup|a_ijkl|) |v|_V on random
/// samples; the witness slot records the sharpest ratios seen on both sides.
CheckReport check_norm_equivalence(const AssembledProblem& problem, int samples,
                                   std::uint64_t seed);

/// Sharpness of the ellipticity constant: the interpolated shear field
/// (x2, 0) attains (u . Au) / v_norm(u)^2 = m_E exactly when the smallest
/// Voigt eigenvalue is the shear one and the FIXED boundary lies on x2 = 0.
/// Reported as the relative gap vs a 1e-6 band.
CheckReport check_monotonicity_sharpness(const AssembledProblem& problem);

/// Sharpness of the norm-equivalence constants. The lower constant
/// sqrt(m_E) is attained by the shear witness on V. The largest possible
/// ratio is sqrt(lambda_max(voigt)) and is attained by a constant eigen
/// field at the tensor-field level; it stays below the claimed
/// sqrt(d sup|a_ijkl|), which the check also verifies. Measured value is
/// the worst relative gap of the two witnesses vs a 1e-6 band.
CheckReport check_norm_equivalence_sharpness(const AssembledProblem& problem);

/// The continuity constant of the per-history solve, reconstructed from the
/// two partial estimates behind it: C = 1/m_E + (d sup|a_ijkl| / m_E + 1).
double history_stability_constant(const ElasticTensor& E);

/// Solves the inequality for seeded random history pairs (eta1, eta2) at
/// fixed load and measures
///   (|sigma1 - sigma2|_Q + |eps(u1) - eps(u2)|_Q) / |eta1 - eta2|_Q,
/// which must stay below history_stability_constant.
CheckReport check_history_stability(const AssembledProblem& problem, double t, int samples,
                                    std::uint64_t seed);

/// Signorini residuals over a whole trajectory: gap feasibility, multiplier
/// sign, and the complementarity product, each measured against tol. The
/// tangential contact force is zero by construction (the constraint acts
/// along the pair normal only), asserted exactly.
CheckReport check_complementarity(const AssembledProblem& problem, const DiscreteState& state,
                                  double tol);

/// Successive residual ratios of a fixed-point iteration; passes when the
/// median of the tail (last max(3, ceil(k/2)) ratios) is below 1. Fewer than
/// 3 residuals pass only if the iteration had already converged (last
/// residual below floor).
CheckReport measure_contraction(const std::vector<double>& residuals, double floor = 1e-10);

/// Least-squares slope of log error vs log dt.
double fit_order(const std::vector<double>& dts, const std::vector<double>& errors);

struct ConvergenceStudy {
  std::vector<double> dts;
  std::vector<double> errors;  // |u_N(dt) - u_N(ref)|_V at the shared horizon
  double order = 0.0;
  bool monotone = false;
};

/// Self-convergence of the final-time displacement against a dt_ref
/// reference run of the same scheme and rule.
ConvergenceStudy convergence_study(const ProblemSpec& base, const std::vector<double>& dts,
                                   double dt_ref);

CheckReport check_convergence_order(const ConvergenceStudy& study, double expected_order,
                                    double band);

/// The default desk-scale suite behind `verify`: runs every check above on
/// shipped toy problems. Deterministic for a fixed seed.
std::vector<CheckReport> run_verify_suite(std::uint64_t seed);

}  // namespace viscontact
