#pragma once

namespace viscontact {

/// Entry point behind the viscontact binary. Subcommands: mesh (write a
/// preset mesh file), solve (run the integrator per config), verify (run the
/// check suite), study (time-step self-convergence). Returns 0 on success,
/// 1 on solver nonconvergence or failed checks, 2 on input errors.
int cli_main(int argc, const char* const* argv);

}  // namespace viscontact
