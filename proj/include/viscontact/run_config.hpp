#pragma once

#include <cstdint>
#include <string>

#include "viscontact/assembly.hpp"
#include "viscontact/material.hpp"
#include "viscontact/solver_config.hpp"
#include "viscontact/time_integrator.hpp"
#include "viscontact/types.hpp"

namespace viscontact {

/// Which result fields land in the VTK snapshots.
struct OutputFields {
  bool u = true;
  bool sigma = true;
  bool eta = true;
  bool lambda = true;
};

/// Typed view of a plain "key = value" run configuration. Defaults reflect
/// an elastic unit problem; parse_config fills and validates them.
struct RunConfig {
  std::string mesh_file;

  double youngs = 1.0;
  double poisson = 0.3;
  PlaneMode mode = PlaneMode::Strain;

  ViscoplasticLaw::Kind law_kind = ViscoplasticLaw::Kind::Zero;
  double kappa = 0.0;
  double sigma_y = 0.0;

  LoadSpec load;

  Vec2 init_sigma_diag = Vec2::Zero();  // (s11, s22)
  double init_sigma_shear = 0.0;        // s12

  double time_dt = 0.1;
  double time_horizon = 1.0;

  SolverConfig solver;

  double contact_gap_override = -1.0;  // < 0 = keep geometric gaps

  std::string out_dir = "out";
  OutputFields fields;
  std::uint64_t seed = 42;
};

/// Parses "key = value" text ('#' comments). Rejects unknown keys, bad
/// types, and out-of-range values with the offending line number; rejects a
/// missing mesh.file when require_mesh is set.
RunConfig parse_config(const std::string& text, bool require_mesh = true);

/// Canonical echo of the full effective configuration (defaults applied);
/// parseable by parse_config and byte-stable for identical inputs.
std::string effective_config(const RunConfig& cfg);

ElasticTensor make_elastic(const RunConfig& cfg);
ViscoplasticLaw make_law(const RunConfig& cfg);

/// Assembles the full problem data for a loaded mesh: material, law, loads,
/// constant initial stress, grid, and solver settings from the config.
ProblemSpec make_problem_spec(const RunConfig& cfg, Mesh2D mesh);

}  // namespace viscontact
