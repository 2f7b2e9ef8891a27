#pragma once

#include "myosolve/constitutive.hpp"
#include "myosolve/dofmap.hpp"
#include "myosolve/mesh.hpp"
#include "myosolve/partition.hpp"
#include "myosolve/unassembled.hpp"

namespace myo {

/// Boundary spring and dashpot, split into components normal and tangential
/// to the reference surface. All-zero parameters disable the term.
struct RobinParams {
  double k_perp = 0.0;
  double k_par = 0.0;
  double c_perp = 0.0;
  double c_par = 0.0;

  bool active() const { return k_perp != 0.0 || k_par != 0.0 || c_perp != 0.0 || c_par != 0.0; }
};

/// Discrete problem: mesh, decomposition, material, and boundary programs.
/// Cavity pressure acts on endo faces; Robin terms on base and epi faces as
/// configured; free faces carry nothing.
struct Problem {
  const HexMesh* mesh = nullptr;
  const Partition* partition = nullptr;
  const DofMap* dofs = nullptr;
  GuccioneParams material;
  RobinParams robin_base;
  RobinParams robin_epi;
  bool follower_pressure = true;  // false: dead traction along the reference normal
};

/// Inputs of one residual or Jacobian evaluation. Displacement histories feed
/// the inertia difference quotient and the dashpot rate.
struct StepState {
  double dt = 1.0;
  double pressure = 0.0;  // Pa
  double gamma = 0.0;     // Pa
  std::span<const double> d;
  std::span<const double> d_prev;
  std::span<const double> d_prev2;
};

/// Global residual, accumulated as the sum of per-subdomain contributions.
std::vector<double> assemble_residual(const Problem& prob, const StepState& s);

/// Jacobian in unassembled per-subdomain form, rigid-body modes attached.
UnassembledMatrix assemble_jacobian(const Problem& prob, const StepState& s);

}  // namespace myo
