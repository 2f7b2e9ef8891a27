#include "myosolve/gmres.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace myo {

namespace {

double nrm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double dot_prod(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

GmresResult gmres(const LinearOp& apply_a, const LinearOp& apply_m, std::span<const double> b,
                  std::span<double> x, const GmresOptions& opts) {
  const index_t n = static_cast<index_t>(b.size());
  const index_t m = std::min<index_t>(opts.restart, std::max<index_t>(n, 1));
  GmresResult res;

  const double bnorm = nrm2(b);
  const double target = std::max(opts.atol, opts.rtol * bnorm);
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    res.converged = true;
    res.residual_history.push_back(0.0);
    return res;
  }

  std::vector<double> r(n), w(n), z(n);
  std::vector<std::vector<double>> v;
  std::vector<double> h((m + 1) * m, 0.0);  // column-major Hessenberg
  std::vector<double> cs(m), sn(m), g(m + 1), y(m);
  auto hess = [&](index_t i, index_t j) -> double& { return h[j * (m + 1) + i]; };

  while (true) {
    apply_a(x, r);
    for (index_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
    double beta = nrm2(r);
    if (res.residual_history.empty()) res.residual_history.push_back(beta);
    if (beta <= target) {
      res.converged = true;
      res.rel_residual = beta / bnorm;
      return res;
    }
    if (res.iters >= opts.max_iters) {
      res.rel_residual = beta / bnorm;
      return res;
    }

    v.assign(1, std::vector<double>(r.begin(), r.end()));
    for (double& val : v[0]) val /= beta;
    std::fill(g.begin(), g.end(), 0.0);
    g[0] = beta;
    std::fill(h.begin(), h.end(), 0.0);

    index_t k = 0;
    for (; k < m && res.iters < opts.max_iters; ++k) {
      apply_m(v[k], z);
      apply_a(z, w);

      for (int pass = 0; pass < 2; ++pass) {
        for (index_t i = 0; i <= k; ++i) {
          const double d = dot_prod(w, v[i]);
          hess(i, k) += d;
          for (index_t q = 0; q < n; ++q) w[q] -= d * v[i][q];
        }
      }
      const double hk1 = nrm2(w);
      hess(k + 1, k) = hk1;

      for (index_t i = 0; i < k; ++i) {
        const double t = cs[i] * hess(i, k) + sn[i] * hess(i + 1, k);
        hess(i + 1, k) = -sn[i] * hess(i, k) + cs[i] * hess(i + 1, k);
        hess(i, k) = t;
      }
      const double denom = std::hypot(hess(k, k), hess(k + 1, k));
      if (denom == 0.0) {
        cs[k] = 1.0;
        sn[k] = 0.0;
      } else {
        cs[k] = hess(k, k) / denom;
        sn[k] = hess(k + 1, k) / denom;
      }
      hess(k, k) = denom;
      hess(k + 1, k) = 0.0;
      g[k + 1] = -sn[k] * g[k];
      g[k] = cs[k] * g[k];

      ++res.iters;
      const double est = std::fabs(g[k + 1]);
      res.residual_history.push_back(est);

      if (hk1 == 0.0 || est <= target) {
        ++k;
        break;
      }
      v.emplace_back(w.begin(), w.end());
      for (double& val : v.back()) val /= hk1;
    }

    for (index_t i = k - 1; i >= 0; --i) {
      double s = g[i];
      for (index_t j = i + 1; j < k; ++j) s -= hess(i, j) * y[j];
      y[i] = s / hess(i, i);
    }
    std::fill(z.begin(), z.end(), 0.0);
    for (index_t j = 0; j < k; ++j)
      for (index_t q = 0; q < n; ++q) z[q] += y[j] * v[j][q];
    apply_m(z, w);
    for (index_t q = 0; q < n; ++q) x[q] += w[q];
    // loop back: the true residual decides convergence or another cycle
  }
}

GmresResult gmres(const LinearOp& apply_a, std::span<const double> b, std::span<double> x,
                  const GmresOptions& opts) {
  const LinearOp identity = [](std::span<const double> in, std::span<double> out) {
    std::copy(in.begin(), in.end(), out.begin());
  };
  return gmres(apply_a, identity, b, x, opts);
}

bool probe_symmetry(const LinearOp& apply_a, index_t n, int pairs, double tol) {
  std::mt19937 rng(0x51a9);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> x(n), y(n), ax(n), ay(n);
  for (int p = 0; p < pairs; ++p) {
    for (double& v : x) v = dist(rng);
    for (double& v : y) v = dist(rng);
    apply_a(x, ax);
    apply_a(y, ay);
    const double xay = dot_prod(x, ay);
    const double yax = dot_prod(y, ax);
    const double scale = nrm2(ax) * nrm2(y) + nrm2(ay) * nrm2(x);
    if (scale == 0.0) continue;
    if (std::fabs(xay - yax) > tol * scale) return false;
  }
  return true;
}

}  // namespace myo
