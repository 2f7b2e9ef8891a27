#include "myosolve/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace myo {

namespace {

int tensor_corner(int c0, int c1, int c2) { return c0 + 2 * c1 + 4 * c2; }

int vtk_of_tensor(int t) { return vtk_corner(t & 1, (t >> 1) & 1, (t >> 2) & 1); }

std::array<double, 8> trilinear_deriv(double x0, double x1, double x2, int axis) {
  // d/d(axis) of the 8 trilinear shape functions at (x0,x1,x2) in [-1,1]^3,
  // tensor corner order.
  std::array<double, 8> g;
  for (int c2 = 0; c2 < 2; ++c2)
    for (int c1 = 0; c1 < 2; ++c1)
      for (int c0 = 0; c0 < 2; ++c0) {
        double s0 = c0 ? 1.0 : -1.0, s1 = c1 ? 1.0 : -1.0, s2 = c2 ? 1.0 : -1.0;
        double f0 = 0.5 * (1.0 + s0 * x0), f1 = 0.5 * (1.0 + s1 * x1), f2 = 0.5 * (1.0 + s2 * x2);
        double d0 = 0.5 * s0, d1 = 0.5 * s1, d2 = 0.5 * s2;
        double val = axis == 0 ? d0 * f1 * f2 : axis == 1 ? f0 * d1 * f2 : f0 * f1 * d2;
        g[tensor_corner(c0, c1, c2)] = val;
      }
  return g;
}

void check_jacobians(const HexMesh& mesh) {
  const double gp[3] = {-std::sqrt(0.6), 0.0, std::sqrt(0.6)};
  for (index_t e = 0; e < mesh.n_hexes(); ++e) {
    Vec3 corner[8];
    for (int t = 0; t < 8; ++t) corner[t] = mesh.nodes[mesh.hexes[e][vtk_of_tensor(t)]];
    for (int q2 = 0; q2 < 3; ++q2)
      for (int q1 = 0; q1 < 3; ++q1)
        for (int q0 = 0; q0 < 3; ++q0) {
          Mat3 J;
          for (int axis = 0; axis < 3; ++axis) {
            auto g = trilinear_deriv(gp[q0], gp[q1], gp[q2], axis);
            for (int t = 0; t < 8; ++t)
              for (int d = 0; d < 3; ++d) J(d, axis) += corner[t][d] * g[t];
          }
          if (!(det(J) > 0.0))
            throw ElementInversionError("hex has non-positive geometric Jacobian", e);
        }
  }
}

void check_fibers(const HexMesh& mesh) {
  for (index_t i = 0; i < mesh.n_nodes(); ++i) {
    const FiberFrame& fr = mesh.fibers[i];
    double tol = 1e-12;
    bool unit = std::abs(norm(fr.f) - 1.0) < tol && std::abs(norm(fr.s) - 1.0) < tol &&
                std::abs(norm(fr.n) - 1.0) < tol;
    bool orth = std::abs(dot(fr.f, fr.s)) < tol && std::abs(dot(fr.f, fr.n)) < tol &&
                std::abs(dot(fr.s, fr.n)) < tol;
    if (!unit || !orth) throw std::invalid_argument("fiber frame not orthonormal at node");
  }
}

}  // namespace

const char* region_name(Region r) {
  switch (r) {
    case Region::base: return "base";
    case Region::epi: return "epi";
    case Region::endo: return "endo";
    case Region::free_boundary: return "free";
  }
  return "?";
}

std::array<index_t, 4> face_nodes(const HexMesh& mesh, const BoundaryFace& face) {
  const FaceAxes fa = face_axes(face.local_face);
  std::array<index_t, 4> out;
  const int su[4] = {0, 1, 1, 0};
  const int sv[4] = {0, 0, 1, 1};
  for (int c = 0; c < 4; ++c) {
    int coord[3];
    coord[fa.axis] = fa.side;
    coord[fa.u] = su[c];
    coord[fa.v] = sv[c];
    int t = tensor_corner(coord[0], coord[1], coord[2]);
    out[c] = mesh.hexes[face.hex][vtk_of_tensor(t)];
  }
  return out;
}

HexMesh build_beam_mesh(index_t nx, index_t ny, index_t nz, double lx, double ly, double lz) {
  if (nx < 1 || ny < 1 || nz < 1) throw std::invalid_argument("beam mesh needs positive divisions");
  if (!(lx > 0.0 && ly > 0.0 && lz > 0.0))
    throw std::invalid_argument("beam mesh needs positive extents");
  HexMesh m;
  m.kind = MeshKind::box;
  m.grid = {nx, ny, nz};
  auto node_id = [&](index_t i, index_t j, index_t k) { return i + (nx + 1) * (j + (ny + 1) * k); };
  m.nodes.resize(static_cast<size_t>(nx + 1) * (ny + 1) * (nz + 1));
  for (index_t k = 0; k <= nz; ++k)
    for (index_t j = 0; j <= ny; ++j)
      for (index_t i = 0; i <= nx; ++i)
        m.nodes[node_id(i, j, k)] = {lx * i / nx, ly * j / ny, lz * k / nz};
  m.fibers.assign(m.nodes.size(), FiberFrame{});

  m.hexes.reserve(static_cast<size_t>(nx) * ny * nz);
  for (index_t k = 0; k < nz; ++k)
    for (index_t j = 0; j < ny; ++j)
      for (index_t i = 0; i < nx; ++i) {
        index_t tens[8];
        for (int c2 = 0; c2 < 2; ++c2)
          for (int c1 = 0; c1 < 2; ++c1)
            for (int c0 = 0; c0 < 2; ++c0)
              tens[tensor_corner(c0, c1, c2)] = node_id(i + c0, j + c1, k + c2);
        std::array<index_t, 8> vtk;
        for (int t = 0; t < 8; ++t) vtk[vtk_of_tensor(t)] = tens[t];
        m.hexes.push_back(vtk);

        index_t e = static_cast<index_t>(m.hexes.size()) - 1;
        if (i == 0) m.boundary.push_back({e, 0, Region::base});
        if (i == nx - 1) m.boundary.push_back({e, 1, Region::free_boundary});
        if (j == 0) m.boundary.push_back({e, 2, Region::free_boundary});
        if (j == ny - 1) m.boundary.push_back({e, 3, Region::free_boundary});
        if (k == 0) m.boundary.push_back({e, 4, Region::endo});
        if (k == nz - 1) m.boundary.push_back({e, 5, Region::epi});
      }
  check_jacobians(m);
  return m;
}

HexMesh build_ellipsoid_mesh(index_t n_circ, index_t n_trans, index_t n_api,
                             const EllipsoidGeometry& geo) {
  if (n_circ < 4 || n_trans < 1 || n_api < 1)
    throw std::invalid_argument("ellipsoid mesh needs n_circ >= 4 and positive layer counts");
  if (!(geo.endo_a < geo.epi_a && geo.endo_b < geo.epi_b && geo.endo_c < geo.epi_c))
    throw std::invalid_argument("endo semi-axes must be strictly inside epi semi-axes");
  if (!(std::abs(geo.base_plane) < geo.endo_c))
    throw std::invalid_argument("basal plane must intersect the endo surface");
  if (!(geo.apex_offset > 0.0 && geo.endo_c - geo.apex_offset > std::abs(geo.base_plane)))
    throw std::invalid_argument("apex offset out of range");

  HexMesh m;
  m.kind = MeshKind::shell;
  m.grid = {n_circ, n_trans, n_api};

  const double pi = 3.14159265358979323846;
  auto node_id = [&](index_t ic, index_t it, index_t ia) {
    return ic + n_circ * (it + (n_trans + 1) * ia);
  };
  m.nodes.resize(static_cast<size_t>(n_circ) * (n_trans + 1) * (n_api + 1));
  m.fibers.resize(m.nodes.size());

  for (index_t ia = 0; ia <= n_api; ++ia)
    for (index_t it = 0; it <= n_trans; ++it) {
      double tau = static_cast<double>(it) / n_trans;
      double a = geo.endo_a + tau * (geo.epi_a - geo.endo_a);
      double b = geo.endo_b + tau * (geo.epi_b - geo.endo_b);
      double c = geo.endo_c + tau * (geo.epi_c - geo.endo_c);
      double phi_base = std::acos(-geo.base_plane / c);
      double phi_apex = std::acos((c - geo.apex_offset) / c);
      double phi = phi_apex + (phi_base - phi_apex) * ia / n_api;
      double alpha = (geo.fiber_angle_endo_deg +
                      tau * (geo.fiber_angle_epi_deg - geo.fiber_angle_endo_deg)) *
                     pi / 180.0;
      for (index_t ic = 0; ic < n_circ; ++ic) {
        double theta = 2.0 * pi * ic / n_circ;
        double st = std::sin(theta), ct = std::cos(theta);
        double sp = std::sin(phi), cp = std::cos(phi);
        m.nodes[node_id(ic, it, ia)] = {a * sp * ct, b * sp * st, -c * cp};

        Vec3 e_c = normalized({-a * sp * st, b * sp * ct, 0.0});
        Vec3 e_l{a * cp * ct, b * cp * st, c * sp};
        e_l = normalized(e_l - dot(e_l, e_c) * e_c);
        Vec3 trans = cross(e_c, e_l);
        FiberFrame fr;
        fr.f = std::cos(alpha) * e_c + std::sin(alpha) * e_l;
        fr.s = trans;
        fr.n = cross(fr.f, fr.s);
        m.fibers[node_id(ic, it, ia)] = fr;
      }
    }

  for (index_t ia = 0; ia < n_api; ++ia)
    for (index_t ic = 0; ic < n_circ; ++ic)
      for (index_t it = 0; it < n_trans; ++it) {
        index_t tens[8];
        // Tensor axes: transmural, circumferential, apicobasal (right-handed).
        for (int c2 = 0; c2 < 2; ++c2)
          for (int c1 = 0; c1 < 2; ++c1)
            for (int c0 = 0; c0 < 2; ++c0)
              tens[tensor_corner(c0, c1, c2)] =
                  node_id((ic + c1) % n_circ, it + c0, ia + c2);
        std::array<index_t, 8> vtk;
        for (int t = 0; t < 8; ++t) vtk[vtk_of_tensor(t)] = tens[t];
        m.hexes.push_back(vtk);

        index_t e = static_cast<index_t>(m.hexes.size()) - 1;
        if (it == 0) m.boundary.push_back({e, 0, Region::endo});
        if (it == n_trans - 1) m.boundary.push_back({e, 1, Region::epi});
        if (ia == 0) m.boundary.push_back({e, 4, Region::free_boundary});
        if (ia == n_api - 1) m.boundary.push_back({e, 5, Region::base});
      }
  check_jacobians(m);
  check_fibers(m);
  return m;
}

double cavity_volume(const HexMesh& mesh) {
  if (mesh.kind != MeshKind::shell)
    throw std::invalid_argument("cavity volume is defined for shell meshes");
  double z_top = -1e300;
  for (const BoundaryFace& bf : mesh.boundary)
    if (bf.tag == Region::endo)
      for (index_t n : face_nodes(mesh, bf)) z_top = std::max(z_top, mesh.nodes[n][2]);
  Vec3 p0{0.0, 0.0, z_top};

  const double g = 1.0 / std::sqrt(3.0);
  const double qp[2] = {-g, g};
  double vol = 0.0;
  for (const BoundaryFace& bf : mesh.boundary) {
    if (bf.tag != Region::endo) continue;
    auto fn = face_nodes(mesh, bf);
    Vec3 c[4];
    for (int i = 0; i < 4; ++i) c[i] = mesh.nodes[fn[i]];
    for (double u : qp)
      for (double v : qp) {
        // Bilinear patch over the CCW corner order (-,-),(+,-),(+,+),(-,+).
        double N[4] = {0.25 * (1 - u) * (1 - v), 0.25 * (1 + u) * (1 - v),
                       0.25 * (1 + u) * (1 + v), 0.25 * (1 - u) * (1 + v)};
        double Nu[4] = {-0.25 * (1 - v), 0.25 * (1 - v), 0.25 * (1 + v), -0.25 * (1 + v)};
        double Nv[4] = {-0.25 * (1 - u), -0.25 * (1 + u), 0.25 * (1 + u), 0.25 * (1 - u)};
        Vec3 x{}, xu{}, xv{};
        for (int i = 0; i < 4; ++i) {
          x = x + N[i] * c[i];
          xu = xu + Nu[i] * c[i];
          xv = xv + Nv[i] * c[i];
        }
        // face normal points out of the tissue, i.e. into the cavity
        vol -= dot(x - p0, cross(xu, xv)) / 3.0;
      }
  }
  return vol;
}

void export_mesh(const HexMesh& mesh, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open mesh file for writing: " + path);
  char buf[512];
  os << "myomesh 1\n";
  os << "kind " << (mesh.kind == MeshKind::box ? "box" : "shell") << " " << mesh.grid[0] << " "
     << mesh.grid[1] << " " << mesh.grid[2] << "\n";
  os << "nodes " << mesh.n_nodes() << "\n";
  for (index_t i = 0; i < mesh.n_nodes(); ++i) {
    const Vec3& x = mesh.nodes[i];
    const FiberFrame& fr = mesh.fibers[i];
    std::snprintf(buf, sizeof buf,
                  "%.17g %.17g %.17g %.17g %.17g %.17g %.17g %.17g %.17g %.17g %.17g %.17g\n",
                  x[0], x[1], x[2], fr.f[0], fr.f[1], fr.f[2], fr.s[0], fr.s[1], fr.s[2], fr.n[0],
                  fr.n[1], fr.n[2]);
    os << buf;
  }
  os << "hexes " << mesh.n_hexes() << "\n";
  for (const auto& h : mesh.hexes) {
    for (int c = 0; c < 8; ++c) os << h[c] << (c == 7 ? '\n' : ' ');
  }
  os << "boundary " << mesh.boundary.size() << "\n";
  for (const BoundaryFace& bf : mesh.boundary)
    os << bf.hex << " " << bf.local_face << " " << region_name(bf.tag) << "\n";
  os << "end\n";
  if (!os) throw std::runtime_error("failed writing mesh file: " + path);
}

namespace {

[[noreturn]] void parse_fail(const std::string& path, int line, const std::string& what) {
  throw std::runtime_error(path + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

HexMesh import_mesh(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open mesh file: " + path);
  int lineno = 0;
  auto next_line = [&](std::string& out) {
    if (!std::getline(is, out)) parse_fail(path, lineno, "unexpected end of file");
    ++lineno;
  };

  std::string line, word;
  next_line(line);
  {
    std::istringstream ss(line);
    int version = 0;
    ss >> word >> version;
    if (word != "myomesh" || version != 1) parse_fail(path, lineno, "expected header 'myomesh 1'");
  }

  HexMesh m;
  next_line(line);
  {
    std::istringstream ss(line);
    std::string kind;
    ss >> word >> kind >> m.grid[0] >> m.grid[1] >> m.grid[2];
    if (word != "kind" || (kind != "box" && kind != "shell") || !ss)
      parse_fail(path, lineno, "malformed kind line");
    m.kind = kind == "box" ? MeshKind::box : MeshKind::shell;
  }

  index_t count = 0;
  next_line(line);
  {
    std::istringstream ss(line);
    ss >> word >> count;
    if (word != "nodes" || !ss || count < 0) parse_fail(path, lineno, "malformed node count");
  }
  m.nodes.resize(count);
  m.fibers.resize(count);
  for (index_t i = 0; i < count; ++i) {
    next_line(line);
    std::istringstream ss(line);
    Vec3& x = m.nodes[i];
    FiberFrame& fr = m.fibers[i];
    ss >> x[0] >> x[1] >> x[2] >> fr.f[0] >> fr.f[1] >> fr.f[2] >> fr.s[0] >> fr.s[1] >> fr.s[2] >>
        fr.n[0] >> fr.n[1] >> fr.n[2];
    if (!ss) parse_fail(path, lineno, "malformed node line");
  }

  next_line(line);
  {
    std::istringstream ss(line);
    ss >> word >> count;
    if (word != "hexes" || !ss || count < 0) parse_fail(path, lineno, "malformed hex count");
  }
  m.hexes.resize(count);
  for (index_t e = 0; e < count; ++e) {
    next_line(line);
    std::istringstream ss(line);
    for (int c = 0; c < 8; ++c) {
      ss >> m.hexes[e][c];
      if (!ss || m.hexes[e][c] < 0 || m.hexes[e][c] >= m.n_nodes())
        parse_fail(path, lineno, "hex references node out of range");
    }
  }

  next_line(line);
  {
    std::istringstream ss(line);
    ss >> word >> count;
    if (word != "boundary" || !ss || count < 0) parse_fail(path, lineno, "malformed boundary count");
  }
  m.boundary.resize(count);
  for (index_t b = 0; b < count; ++b) {
    next_line(line);
    std::istringstream ss(line);
    std::string tag;
    BoundaryFace& bf = m.boundary[b];
    ss >> bf.hex >> bf.local_face >> tag;
    if (!ss || bf.hex < 0 || bf.hex >= m.n_hexes() || bf.local_face < 0 || bf.local_face > 5)
      parse_fail(path, lineno, "malformed boundary face");
    if (tag == "base")
      bf.tag = Region::base;
    else if (tag == "epi")
      bf.tag = Region::epi;
    else if (tag == "endo")
      bf.tag = Region::endo;
    else if (tag == "free")
      bf.tag = Region::free_boundary;
    else
      parse_fail(path, lineno, "unknown region tag '" + tag + "'");
  }

  next_line(line);
  if (line != "end") parse_fail(path, lineno, "expected trailing 'end'");
  check_jacobians(m);
  return m;
}

}  // namespace myo
