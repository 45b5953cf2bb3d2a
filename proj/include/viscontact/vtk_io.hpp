#pragma once

#include <string>

#include "viscontact/run_config.hpp"
#include "viscontact/time_integrator.hpp"

namespace viscontact {

/// One time node as a legacy ASCII VTK unstructured grid: points, triangle
/// cells, displacement as point vectors, contact pressure as a point scalar
/// (lambda on the two nodes of its pair, 0 elsewhere), stress and history as
/// per-cell component scalars (physical components, not the packed scaling).
/// Field selection follows `fields`; omitted fields leave no arrays behind.
std::string vtk_snapshot(const Mesh2D& mesh, const DofMap& dofs, const ConstraintSet& pairs,
                         const VectorX& u, const TensorField& sigma, const TensorField& eta,
                         const VectorX& multipliers, double t, const OutputFields& fields);

std::string vtk_snapshot(const AssembledProblem& problem, const DiscreteState& state, int j,
                         const OutputFields& fields);

/// CSV over time nodes: t, max gap residual, total contact force, v_norm(u),
/// Q-norm of sigma, fixed-point iterations charged to the node (sweeps for
/// the global scheme, inner iterations for marching).
std::string timeseries_csv(const AssembledProblem& problem, const DiscreteState& state);

/// Writes text to path, creating parent directories. Throws Error on
/// failure.
void save_text(const std::string& path, const std::string& text);

std::string load_text(const std::string& path);

}  // namespace viscontact
