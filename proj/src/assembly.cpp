#include "myosolve/assembly.hpp"

#include <array>
#include <cmath>
#include <map>

#include "myosolve/element.hpp"

namespace myo {

namespace {

struct FaceRule {
  struct Pt {
    Vec3 xi;
    double w;
  };
  std::vector<Pt> pts;
  int axis_u = 0;
  int axis_v = 0;
};

// 2D Gauss points of one reference face, embedded in the hex. The tangent
// pair (axis_u, axis_v) is ordered so x_u cross x_v points outward.
FaceRule face_rule(int order, int face) {
  const FaceAxes ax = face_axes(face);
  const Quadrature1d g = gauss_1d(order + 1);
  FaceRule r;
  r.axis_u = ax.u;
  r.axis_v = ax.v;
  for (std::size_t j = 0; j < g.x.size(); ++j)
    for (std::size_t i = 0; i < g.x.size(); ++i) {
      Vec3 xi{0.0, 0.0, 0.0};
      xi[ax.axis] = ax.side ? 1.0 : -1.0;
      xi[ax.u] = g.x[i];
      xi[ax.v] = g.x[j];
      r.pts.push_back({xi, g.w[i] * g.w[j]});
    }
  return r;
}

inline Vec3 column(const Mat3& m, int c) { return Vec3{m(0, c), m(1, c), m(2, c)}; }

struct QpFrame {
  Vec3 f, s, n;
};

// Fiber frame interpolated from the corners and re-orthonormalized; the
// trilinear blend of unit frames is not exactly orthonormal.
QpFrame interp_frame(const std::array<FiberFrame, 8>& fib, const double n1[8]) {
  Vec3 f{0, 0, 0}, s{0, 0, 0};
  for (int c = 0; c < 8; ++c) {
    f = f + n1[c] * fib[c].f;
    s = s + n1[c] * fib[c].s;
  }
  f = normalized(f);
  s = normalized(s - dot(s, f) * f);
  return {f, s, cross(f, s)};
}

struct ElementData {
  std::array<Vec3, 8> corners;
  std::array<FiberFrame, 8> fib;
  std::array<Vec3, 27> de, dep, depp;
};

void gather_element(const Problem& prob, const StepState& st, index_t hex, int nn,
                    ElementData& ed) {
  const HexMesh& mesh = *prob.mesh;
  for (int c = 0; c < 8; ++c) {
    ed.corners[c] = mesh.nodes[mesh.hexes[hex][c]];
    ed.fib[c] = mesh.fibers[mesh.hexes[hex][c]];
  }
  const index_t* en = &prob.dofs->element_nodes[static_cast<std::size_t>(hex) * nn];
  for (int a = 0; a < nn; ++a) {
    const index_t g = en[a];
    for (int i = 0; i < 3; ++i) {
      ed.de[a][i] = st.d[3 * g + i];
      ed.dep[a][i] = st.d_prev[3 * g + i];
      ed.depp[a][i] = st.d_prev2[3 * g + i];
    }
  }
}

// Shared element walk. `r_out` accumulates the global residual when non-null;
// `trips` collects local Jacobian triplets when non-null (both may be set).
void element_terms(const Problem& prob, const StepState& st, const BasisTable& vb,
                   const std::array<FaceRule, 6>& frules,
                   const std::multimap<index_t, BoundaryFace>& faces_of_hex, index_t hex,
                   const index_t* local_nodes, std::vector<double>* r_out,
                   std::vector<Triplet>* trips) {
  const int nn = vb.n_nodes;
  ElementData ed;
  gather_element(prob, st, hex, nn, ed);
  const GuccioneParams& mat = prob.material;
  const ActiveState act{st.gamma};
  const double mass_coef = mat.rho / (st.dt * st.dt);
  const index_t* en = &prob.dofs->element_nodes[static_cast<std::size_t>(hex) * nn];

  std::array<Vec3, 27> g;
  double n1[8];
  Vec3 dn1[8];

  for (int q = 0; q < vb.n_qp; ++q) {
    const double* nq = &vb.n[static_cast<std::size_t>(q) * nn];
    const Vec3* dnq = &vb.dn[static_cast<std::size_t>(q) * nn];

    Vec3 x;
    Mat3 j0;
    eval_geometry(ed.corners, vb.xi[q], x, j0);
    const double detj = det(j0);
    if (detj <= 0.0) throw ElementInversionError("element_terms: inverted geometry", hex);
    const Mat3 j0it = transpose(inverse(j0));
    for (int a = 0; a < nn; ++a) g[a] = j0it * dnq[a];

    Mat3 f = Mat3::identity();
    for (int a = 0; a < nn; ++a) f = f + outer(ed.de[a], g[a]);

    eval_basis(1, vb.xi[q], n1, dn1);
    const QpFrame fr = interp_frame(ed.fib, n1);
    const DeformationState state{f, fr.f, fr.s, fr.n};
    const double w = vb.w[q] * detj;

    Vec3 udd{0, 0, 0};
    if (mass_coef != 0.0)
      for (int b = 0; b < nn; ++b)
        udd = udd + nq[b] * (ed.de[b] - 2.0 * ed.dep[b] + ed.depp[b]);

    if (r_out) {
      const Mat3 p = piola(state, mat, act);
      for (int a = 0; a < nn; ++a) {
        const Vec3 ra = w * (p * g[a] + (mass_coef * nq[a]) * udd);
        for (int i = 0; i < 3; ++i) (*r_out)[3 * en[a] + i] += ra[i];
      }
    }
    if (trips) {
      for (int b = 0; b < nn; ++b) {
        const index_t lb = local_nodes[b];
        for (int j = 0; j < 3; ++j) {
          Vec3 ej{0, 0, 0};
          ej[j] = 1.0;
          const Mat3 dp = tangent_apply(state, mat, act, outer(ej, g[b]));
          for (int a = 0; a < nn; ++a) {
            const Vec3 ka = w * dp * g[a];
            const index_t la = local_nodes[a];
            for (int i = 0; i < 3; ++i) trips->push_back({3 * la + i, 3 * lb + j, ka[i]});
          }
        }
        if (mass_coef != 0.0) {
          for (int a = 0; a < nn; ++a) {
            const double v = w * mass_coef * nq[a] * nq[b];
            const index_t la = local_nodes[a];
            for (int i = 0; i < 3; ++i) trips->push_back({3 * la + i, 3 * local_nodes[b] + i, v});
          }
        }
      }
    }
  }

  auto range = faces_of_hex.equal_range(hex);
  std::vector<double> nf(nn);
  std::vector<Vec3> dnf(nn);
  for (auto it = range.first; it != range.second; ++it) {
    const BoundaryFace& bf = it->second;
    const bool is_pressure = bf.tag == Region::endo && st.pressure != 0.0;
    const RobinParams& rp = bf.tag == Region::base ? prob.robin_base : prob.robin_epi;
    const bool is_robin = (bf.tag == Region::base || bf.tag == Region::epi) && rp.active();
    if (!is_pressure && !is_robin) continue;

    const FaceRule& rule = frules[bf.local_face];
    for (const FaceRule::Pt& pt : rule.pts) {
      Vec3 x;
      Mat3 j0;
      eval_geometry(ed.corners, pt.xi, x, j0);
      const Vec3 xu = column(j0, rule.axis_u);
      const Vec3 xv = column(j0, rule.axis_v);
      const Vec3 an = cross(xu, xv);
      const double da = norm(an);
      const Vec3 nref = (1.0 / da) * an;
      const double w2 = pt.w * da;
      eval_basis(vb.order, pt.xi, nf, dnf);

      if (is_pressure) {
        if (prob.follower_pressure) {
          const Mat3 j0it = transpose(inverse(j0));
          for (int a = 0; a < nn; ++a) g[a] = j0it * dnf[a];
          Mat3 f = Mat3::identity();
          for (int a = 0; a < nn; ++a) f = f + outer(ed.de[a], g[a]);
          const double jdet = det(f);
          const Mat3 fit = transpose(inverse(f));
          const Vec3 fn = fit * nref;
          if (r_out) {
            const Vec3 t = (st.pressure * jdet) * fn;
            for (int a = 0; a < nn; ++a)
              for (int i = 0; i < 3; ++i) (*r_out)[3 * en[a] + i] += w2 * nf[a] * t[i];
          }
          if (trips) {
            for (int b = 0; b < nn; ++b) {
              const Vec3 fg = fit * g[b];
              const index_t lb = local_nodes[b];
              for (int a = 0; a < nn; ++a) {
                const double c = w2 * nf[a] * st.pressure * jdet;
                const index_t la = local_nodes[a];
                for (int i = 0; i < 3; ++i)
                  for (int j = 0; j < 3; ++j)
                    trips->push_back({3 * la + i, 3 * lb + j, c * (fg[j] * fn[i] - fn[j] * fg[i])});
              }
            }
          }
        } else if (r_out) {
          // dead load: fixed traction along the reference normal, no tangent
          for (int a = 0; a < nn; ++a)
            for (int i = 0; i < 3; ++i) (*r_out)[3 * en[a] + i] += w2 * nf[a] * st.pressure * nref[i];
        }
      }

      if (is_robin) {
        const double kp = rp.k_perp + rp.c_perp / st.dt;
        const double kt = rp.k_par + rp.c_par / st.dt;
        if (r_out) {
          Vec3 u{0, 0, 0}, ud{0, 0, 0};
          for (int b = 0; b < nn; ++b) {
            u = u + nf[b] * ed.de[b];
            ud = ud + (nf[b] / st.dt) * (ed.de[b] - ed.dep[b]);
          }
          const double un = dot(nref, u);
          const double udn = dot(nref, ud);
          const Vec3 t = (rp.k_perp * un + rp.c_perp * udn) * nref +
                         rp.k_par * (u - un * nref) + rp.c_par * (ud - udn * nref);
          for (int a = 0; a < nn; ++a)
            for (int i = 0; i < 3; ++i) (*r_out)[3 * en[a] + i] += w2 * nf[a] * t[i];
        }
        if (trips) {
          Mat3 m3 = Mat3::zero();
          for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
              m3(i, j) = (kp - kt) * nref[i] * nref[j] + (i == j ? kt : 0.0);
          for (int b = 0; b < nn; ++b) {
            const index_t lb = local_nodes[b];
            for (int a = 0; a < nn; ++a) {
              const double c = w2 * nf[a] * nf[b];
              const index_t la = local_nodes[a];
              for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                  trips->push_back({3 * la + i, 3 * lb + j, c * m3(i, j)});
            }
          }
        }
      }
    }
  }
}

std::multimap<index_t, BoundaryFace> index_boundary(const HexMesh& mesh) {
  std::multimap<index_t, BoundaryFace> m;
  for (const BoundaryFace& bf : mesh.boundary) m.emplace(bf.hex, bf);
  return m;
}

}  // namespace

std::vector<double> assemble_residual(const Problem& prob, const StepState& st) {
  const DofMap& dofs = *prob.dofs;
  const BasisTable vb = volume_basis(dofs.order);
  std::array<FaceRule, 6> frules;
  for (int f = 0; f < 6; ++f) frules[f] = face_rule(dofs.order, f);
  const auto faces_of_hex = index_boundary(*prob.mesh);

  std::vector<double> r(dofs.n_dofs(), 0.0);
  const int nn = vb.n_nodes;
  for (const DofMap::Subdomain& sub : dofs.subdomains) {
    for (std::size_t ei = 0; ei < sub.hexes.size(); ++ei) {
      const index_t* ln = &sub.element_local_nodes[ei * nn];
      element_terms(prob, st, vb, frules, faces_of_hex, sub.hexes[ei], ln, &r, nullptr);
    }
  }
  return r;
}

UnassembledMatrix assemble_jacobian(const Problem& prob, const StepState& st) {
  const DofMap& dofs = *prob.dofs;
  const BasisTable vb = volume_basis(dofs.order);
  std::array<FaceRule, 6> frules;
  for (int f = 0; f < 6; ++f) frules[f] = face_rule(dofs.order, f);
  const auto faces_of_hex = index_boundary(*prob.mesh);

  UnassembledMatrix out;
  out.n_global = dofs.n_dofs();
  out.block_size = dofs.block_size;
  out.blocks.resize(dofs.subdomains.size());

  const int nn = vb.n_nodes;
  std::vector<Triplet> trips;
  for (std::size_t s = 0; s < dofs.subdomains.size(); ++s) {
    const DofMap::Subdomain& sub = dofs.subdomains[s];
    trips.clear();
    for (std::size_t ei = 0; ei < sub.hexes.size(); ++ei) {
      const index_t* ln = &sub.element_local_nodes[ei * nn];
      element_terms(prob, st, vb, frules, faces_of_hex, sub.hexes[ei], ln, nullptr, &trips);
    }
    const index_t nl = dofs.n_local_dofs(static_cast<index_t>(s));
    out.blocks[s].a = csr_from_triplets(nl, nl, std::move(trips));
    trips.clear();
    out.blocks[s].local_to_global.resize(nl);
    for (std::size_t k = 0; k < sub.nodes.size(); ++k)
      for (int i = 0; i < 3; ++i)
        out.blocks[s].local_to_global[3 * k + i] = 3 * sub.nodes[k] + i;
  }
  out.near_nullspace = rigid_body_modes(dofs.node_coords);
  return out;
}

}  // namespace myo
