#include "myosolve/unassembled.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace myo {

void UnassembledMatrix::spmv(std::span<const double> x, std::span<double> y) const {
  std::fill(y.begin(), y.end(), 0.0);
  std::vector<double> xl, yl;
  for (const SubdomainBlock& blk : blocks) {
    const index_t nl = blk.a.rows;
    xl.resize(nl);
    yl.resize(nl);
    for (index_t i = 0; i < nl; ++i) xl[i] = x[blk.local_to_global[i]];
    myo::spmv(blk.a, xl, yl);
    for (index_t i = 0; i < nl; ++i) y[blk.local_to_global[i]] += yl[i];
  }
}

CsrMatrix UnassembledMatrix::assemble() const {
  std::vector<Triplet> trips;
  std::size_t total = 0;
  for (const SubdomainBlock& blk : blocks) total += blk.a.col.size();
  trips.reserve(total);
  for (const SubdomainBlock& blk : blocks) {
    for (index_t r = 0; r < blk.a.rows; ++r) {
      const index_t gr = blk.local_to_global[r];
      for (index_t p = blk.a.ptr[r]; p < blk.a.ptr[r + 1]; ++p)
        trips.push_back({gr, blk.local_to_global[blk.a.col[p]], blk.a.val[p]});
    }
  }
  return csr_from_triplets(n_global, n_global, std::move(trips));
}

void UnassembledMatrix::export_blocks(const std::string& prefix) const {
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    write_matrix_market(prefix + "_sub" + std::to_string(k) + ".mtx", blocks[k].a);
    const std::string map_path = prefix + "_map" + std::to_string(k) + ".txt";
    std::FILE* f = std::fopen(map_path.c_str(), "w");
    if (!f) throw std::runtime_error("cannot open for writing: " + map_path);
    for (index_t g : blocks[k].local_to_global) std::fprintf(f, "%d\n", g);
    std::fclose(f);
  }
}

std::vector<std::vector<double>> rigid_body_modes(const std::vector<Vec3>& coords) {
  const std::size_t nn = coords.size();
  Vec3 c{0.0, 0.0, 0.0};
  for (const Vec3& p : coords) c = c + p;
  if (nn > 0) c = (1.0 / static_cast<double>(nn)) * c;

  std::vector<std::vector<double>> modes(6, std::vector<double>(3 * nn, 0.0));
  for (std::size_t i = 0; i < nn; ++i) {
    const Vec3 r = coords[i] - c;
    for (int a = 0; a < 3; ++a) modes[a][3 * i + a] = 1.0;
    // rotations: displacement e_a x r at each node
    modes[3][3 * i + 1] = -r[2];
    modes[3][3 * i + 2] = r[1];
    modes[4][3 * i + 0] = r[2];
    modes[4][3 * i + 2] = -r[0];
    modes[5][3 * i + 0] = -r[1];
    modes[5][3 * i + 1] = r[0];
  }
  for (auto& m : modes) {
    double n2 = 0.0;
    for (double v : m) n2 += v * v;
    const double n = std::sqrt(n2);
    if (n > 0.0)
      for (double& v : m) v /= n;
  }
  return modes;
}

}  // namespace myo
