#include "qidmrg/measure.hpp"

#include <algorithm>
#include <cmath>

namespace qidmrg {

namespace {

int occupation(int s) { return (s == 1 || s == 2) ? 1 : (s == 3 ? 2 : 0); }

double trace_product(const Eigen::MatrixXd& am, const Eigen::MatrixXd& b) { return am.cwiseProduct(b).sum(); }

}  // namespace

OrbitalRdms measure_turning_point(const Mps& psi) {
  const int n = psi.n_sites();
  std::vector<std::array<Eigen::MatrixXd, 4>> a(n);
  for (int k = 0; k < n; ++k)
    for (int s = 0; s < kSiteDim; ++s) a[k][s] = psi.sites[k].dense(s);

  std::vector<Eigen::MatrixXd> g(n + 1);
  g[n] = Eigen::MatrixXd::Ones(1, 1);
  for (int k = n - 1; k >= 0; --k) {
    g[k] = Eigen::MatrixXd::Zero(a[k][0].rows(), a[k][0].rows());
    for (int s = 0; s < kSiteDim; ++s) g[k].noalias() += a[k][s] * g[k + 1] * a[k][s].transpose();
  }
  if (std::abs(g[0](0, 0) - 1.0) > 1e-8) throw std::invalid_argument("measure_turning_point: state is not normalized");

  OrbitalRdms r;
  r.n = n;
  r.one.assign(n, Eigen::Matrix4d::Zero());
  r.two.assign(n * (n - 1) / 2, Eigen::MatrixXd::Zero(16, 16));
  for (int i = 0; i < n; ++i)
    for (int s = 0; s < kSiteDim; ++s) {
      const Eigen::MatrixXd am = a[i][s] * g[i + 1];
      for (int sp = 0; sp < kSiteDim; ++sp) r.one[i](s, sp) = trace_product(am, a[i][sp]);
    }

  for (int j = 1; j < n; ++j)
    for (int x = 0; x < kSiteDim; ++x)
      for (int xp = 0; xp < kSiteDim; ++xp) {
        Eigen::MatrixXd m = a[j][x] * g[j + 1] * a[j][xp].transpose();
        if (m.isZero(0.0)) continue;
        const bool odd = (occupation(x) + occupation(xp)) % 2 == 1;
        for (int i = j - 1; i >= 0; --i) {
          auto& rho = r.pair(i, j);
          for (int y = 0; y < kSiteDim; ++y) {
            if (a[i][y].size() == 0) continue;
            const Eigen::MatrixXd am = a[i][y] * m;
            for (int yp = 0; yp < kSiteDim; ++yp) rho(4 * y + x, 4 * yp + xp) = trace_product(am, a[i][yp]);
          }
          if (i == 0) break;
          Eigen::MatrixXd next = Eigen::MatrixXd::Zero(a[i][0].rows(), a[i][0].rows());
          for (int s = 0; s < kSiteDim; ++s) {
            const double sign = odd ? kSiteParity[s] : 1.0;
            next.noalias() += sign * (a[i][s] * m * a[i][s].transpose());
          }
          m = std::move(next);
        }
      }
  return r;
}

std::vector<std::vector<double>> cut_spectra(const Mps& psi) {
  const int n = psi.n_sites();
  std::vector<std::vector<double>> out(n + 1);
  Eigen::MatrixXd g = Eigen::MatrixXd::Ones(1, 1);
  out[n] = {1.0};
  for (int k = n - 1; k >= 0; --k) {
    Eigen::MatrixXd next = Eigen::MatrixXd::Zero(psi.sites[k].left.total(), psi.sites[k].left.total());
    for (int s = 0; s < kSiteDim; ++s) {
      const Eigen::MatrixXd a = psi.sites[k].dense(s);
      next.noalias() += a * g * a.transpose();
    }
    g = std::move(next);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (g + g.transpose()), Eigen::EigenvaluesOnly);
    std::vector<double> w(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    std::sort(w.rbegin(), w.rend());
    out[k] = std::move(w);
  }
  return out;
}

OrbitalRdms to_original_order(const OrbitalRdms& chain, const Permutation& ordering) {
  const int n = chain.n;
  if (ordering.size() != n) throw std::invalid_argument("to_original_order: size mismatch");
  OrbitalRdms r;
  r.n = n;
  r.one.resize(n);
  r.two.resize(chain.two.size());
  for (int a = 0; a < n; ++a) r.one[ordering.image[a]] = chain.one[a];
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      const int oa = ordering.image[a], ob = ordering.image[b];
      const Eigen::MatrixXd& src = chain.pair(a, b);
      if (oa < ob) {
        r.pair(oa, ob) = src;
        continue;
      }
      Eigen::MatrixXd dst(16, 16);
      for (int x = 0; x < 4; ++x)
        for (int y = 0; y < 4; ++y)
          for (int xp = 0; xp < 4; ++xp)
            for (int yp = 0; yp < 4; ++yp) {
              const int sign = ((occupation(x) * occupation(y) + occupation(xp) * occupation(yp)) % 2) ? -1 : 1;
              dst(4 * y + x, 4 * yp + xp) = sign * src(4 * x + y, 4 * xp + yp);
            }
      r.pair(ob, oa) = dst;
    }
  return r;
}

}  // namespace qidmrg
