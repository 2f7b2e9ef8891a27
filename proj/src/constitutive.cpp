#include "myosolve/constitutive.hpp"

#include <cmath>
#include <stdexcept>

namespace myo {

namespace {

// Fiber-frame weight matrix; symmetric so E_ab and E_ba contribute equally.
Mat3 weight_matrix(const GuccioneParams& p) {
  Mat3 b;
  b(0, 0) = p.b_ff;
  b(1, 1) = p.b_ss;
  b(2, 2) = p.b_nn;
  b(0, 1) = b(1, 0) = p.b_fs;
  b(0, 2) = b(2, 0) = p.b_fn;
  b(1, 2) = b(2, 1) = p.b_sn;
  return b;
}

Mat3 frame_matrix(const DeformationState& st) {
  Mat3 r;
  for (int i = 0; i < 3; ++i) {
    r(i, 0) = st.f[i];
    r(i, 1) = st.s[i];
    r(i, 2) = st.n[i];
  }
  return r;
}

Mat3 hadamard(const Mat3& x, const Mat3& y) {
  Mat3 r;
  for (int i = 0; i < 9; ++i) r.a[i] = x.a[i] * y.a[i];
  return r;
}

double check_jacobian(const Mat3& F) {
  double J = det(F);
  if (!(J > 0.0)) throw std::invalid_argument("deformation gradient has non-positive determinant");
  return J;
}

// Shared intermediates of the exponential term.
struct ExpTerm {
  Mat3 R;      // frame columns (f, s, n)
  Mat3 b;      // weights
  Mat3 Ehat;   // frame strain R^T E R
  double Q;    // weighted quadratic form
  Mat3 M;      // dQ/dE / 2 = R (b o Ehat) R^T
  double eQ;
};

ExpTerm exp_term(const DeformationState& st, const GuccioneParams& p) {
  ExpTerm t;
  t.R = frame_matrix(st);
  t.b = weight_matrix(p);
  Mat3 E = 0.5 * (transpose(st.F) * st.F - Mat3::identity());
  t.Ehat = transpose(t.R) * E * t.R;
  t.Q = ddot(hadamard(t.b, t.Ehat), t.Ehat);
  t.M = t.R * hadamard(t.b, t.Ehat) * transpose(t.R);
  t.eQ = std::exp(t.Q);
  return t;
}

double vol_g(double J, double B) { return 0.5 * B * (J * std::log(J) + J - 1.0); }
double vol_gprime(double J, double B) { return 0.5 * B * (std::log(J) + 2.0); }

}  // namespace

double psi(const DeformationState& state, const GuccioneParams& p) {
  double J = check_jacobian(state.F);
  ExpTerm t = exp_term(state, p);
  return 0.5 * p.C * (t.eQ - 1.0) + 0.5 * p.B * (J - 1.0) * std::log(J);
}

Mat3 piola_passive(const DeformationState& state, const GuccioneParams& p) {
  double J = check_jacobian(state.F);
  ExpTerm t = exp_term(state, p);
  Mat3 S = (p.C * t.eQ) * t.M;
  Mat3 Finvt = transpose(inverse(state.F));
  return state.F * S + vol_g(J, p.B) * Finvt;
}

Mat3 piola_active(const DeformationState& state, const ActiveState& act) {
  Vec3 u = state.F * state.f;
  double r = norm(u);
  if (!(r > 1e-14 * (1.0 + frobenius(state.F))))
    throw std::invalid_argument("fiber direction collapses under F");
  return (act.gamma / r) * outer(u, state.f);
}

Mat3 piola(const DeformationState& state, const GuccioneParams& p, const ActiveState& act) {
  Mat3 P = piola_passive(state, p);
  if (act.gamma != 0.0) P = P + piola_active(state, act);
  return P;
}

Mat3 tangent_apply(const DeformationState& state, const GuccioneParams& p, const ActiveState& act,
                   const Mat3& dF) {
  double J = check_jacobian(state.F);
  ExpTerm t = exp_term(state, p);
  Mat3 Finv = inverse(state.F);
  Mat3 Finvt = transpose(Finv);

  Mat3 S = (p.C * t.eQ) * t.M;
  Mat3 dE = sym(transpose(state.F) * dF);
  Mat3 dEhat = transpose(t.R) * dE * t.R;
  double dQ = 2.0 * ddot(t.M, dE);
  Mat3 dM = t.R * hadamard(t.b, dEhat) * transpose(t.R);
  Mat3 dS = (p.C * t.eQ) * (dQ * t.M + dM);
  Mat3 dP = dF * S + state.F * dS;

  double dJ = J * trace(Finv * dF);
  dP = dP + (vol_gprime(J, p.B) * dJ) * Finvt - vol_g(J, p.B) * (Finvt * transpose(dF) * Finvt);

  if (act.gamma != 0.0) {
    Vec3 u = state.F * state.f;
    double r = norm(u);
    if (!(r > 1e-14 * (1.0 + frobenius(state.F))))
      throw std::invalid_argument("fiber direction collapses under F");
    Vec3 du = dF * state.f;
    dP = dP + (act.gamma / r) * outer(du, state.f) -
         (act.gamma * dot(u, du) / (r * r * r)) * outer(u, state.f);
  }
  return dP;
}

Tensor4 tangent(const DeformationState& state, const GuccioneParams& p, const ActiveState& act) {
  Tensor4 A;
  for (int k = 0; k < 3; ++k)
    for (int l = 0; l < 3; ++l) {
      Mat3 dF;
      dF(k, l) = 1.0;
      Mat3 dP = tangent_apply(state, p, act, dF);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) A(i, j, k, l) = dP(i, j);
    }
  return A;
}

}  // namespace myo
