#pragma once

namespace viscontact {

enum class Quadrature { Rectangle, Trapezoid };
enum class Scheme { Picard, March };

/// Tolerances and caps shared by the VI solver and the time integrator.
struct SolverConfig {
  double vi_tol = 1e-10;  // step-norm stop: |u_next - u| <= vi_tol (1 + |u|)
  int vi_max_iters = 0;   // 0 = automatic (50 per free dof)
  double vi_step = 0.0;   // 0 = automatic (1 / lambda_max)

  double fp_tol = 1e-10;  // Q-norm residual of the history fixed point
  int fp_max_iters = 200;

  Quadrature quadrature = Quadrature::Trapezoid;
  Scheme scheme = Scheme::Picard;

  int threads = 1;  // workers for the per-node solves of one sweep
};

const char* to_string(Quadrature q);
const char* to_string(Scheme s);

}  // namespace viscontact
