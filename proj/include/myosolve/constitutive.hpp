#pragma once

#include "myosolve/smallmat.hpp"

namespace myo {

/// Transversely-anisotropic exponential material with a volumetric penalty.
/// Units: stresses in Pa, density in kg/m^3. The exponents b_* are
/// dimensionless weights on the fiber-frame Green-Lagrange strain components.
struct GuccioneParams {
  double C = 2000.0;
  double B = 50000.0;
  double b_ff = 8.0;
  double b_ss = 2.0;
  double b_nn = 2.0;
  double b_fs = 4.0;
  double b_fn = 4.0;
  double b_sn = 2.0;
  double rho = 1000.0;  // inertial density; benchmark presets override
};

/// Deformation gradient plus the local orthonormal fiber frame (f, s, n).
struct DeformationState {
  Mat3 F = Mat3::identity();
  Vec3 f{1.0, 0.0, 0.0};
  Vec3 s{0.0, 1.0, 0.0};
  Vec3 n{0.0, 0.0, 1.0};
};

/// Active-contraction state: gamma is the active stress magnitude in Pa.
struct ActiveState {
  double gamma = 0.0;
};

/// Strain energy density. Requires det F > 0.
double psi(const DeformationState& state, const GuccioneParams& p);

/// First Piola-Kirchhoff stress of the passive law, dPsi/dF.
Mat3 piola_passive(const DeformationState& state, const GuccioneParams& p);

/// Active fiber stress gamma * (F f otimes f) / |F f|. Requires |F f| > 0.
Mat3 piola_active(const DeformationState& state, const ActiveState& act);

/// Total stress, passive plus active.
Mat3 piola(const DeformationState& state, const GuccioneParams& p, const ActiveState& act);

/// Directional derivative of the total stress: dP[dF] at the given state.
Mat3 tangent_apply(const DeformationState& state, const GuccioneParams& p, const ActiveState& act,
                   const Mat3& dF);

/// Full fourth-order tangent dP_iJ/dF_kL (passive plus active).
Tensor4 tangent(const DeformationState& state, const GuccioneParams& p, const ActiveState& act);

}  // namespace myo
