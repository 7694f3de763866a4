#include "qidmrg/davidson.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qidmrg {

namespace {

// Orthogonalizes v against the columns of basis twice; returns the final norm.
double orthogonalize(const Eigen::MatrixXd& basis, Eigen::Index used, Eigen::VectorXd& v) {
  for (int pass = 0; pass < 2; ++pass) {
    if (used == 0) break;
    const auto b = basis.leftCols(used);
    v -= b * (b.transpose() * v);
  }
  return v.norm();
}

}  // namespace

DavidsonResult davidson(const MatVec& apply, const Eigen::VectorXd& diagonal, const Eigen::MatrixXd& guess,
                        const DavidsonOptions& opts) {
  const Eigen::Index n = diagonal.size();
  const int k = opts.n_roots;
  if (n == 0) throw std::invalid_argument("davidson: empty problem");
  if (k < 1 || k > n) throw std::invalid_argument("davidson: bad number of roots");

  const Eigen::Index cap = std::min<Eigen::Index>(n, std::max(opts.max_subspace, 2 * k + 2));
  Eigen::MatrixXd v(n, cap), av(n, cap);
  Eigen::Index used = 0;

  auto add_vector = [&](Eigen::VectorXd x) {
    const double before = x.norm();
    if (before == 0.0) return false;
    x /= before;
    const double after = orthogonalize(v, used, x);
    if (after < 1e-10) return false;
    x /= after;
    v.col(used) = x;
    Eigen::VectorXd y(n);
    apply(x, y);
    av.col(used) = y;
    ++used;
    return true;
  };

  for (Eigen::Index c = 0; c < guess.cols() && used < k; ++c) add_vector(guess.col(c));
  if (used < k) {
    std::vector<Eigen::Index> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return diagonal[a] < diagonal[b]; });
    for (Eigen::Index idx : order) {
      if (used >= k) break;
      add_vector(Eigen::VectorXd::Unit(n, idx));
    }
  }

  DavidsonResult res;
  res.values.resize(k);
  res.residuals.resize(k);
  for (int iter = 1; iter <= opts.max_iterations; ++iter) {
    res.iterations = iter;
    const Eigen::MatrixXd g = v.leftCols(used).transpose() * av.leftCols(used);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (g + g.transpose()));
    const Eigen::MatrixXd y = es.eigenvectors().leftCols(k);
    const Eigen::MatrixXd x = v.leftCols(used) * y;
    const Eigen::MatrixXd ax = av.leftCols(used) * y;

    bool all = true;
    std::vector<Eigen::VectorXd> corrections;
    for (int r = 0; r < k; ++r) {
      const double theta = es.eigenvalues()[r];
      Eigen::VectorXd resid = ax.col(r) - theta * x.col(r);
      res.values[r] = theta;
      res.residuals[r] = resid.norm();
      if (res.residuals[r] <= opts.tolerance) continue;
      all = false;
      for (Eigen::Index i = 0; i < n; ++i) {
        double d = diagonal[i] - theta;
        if (std::abs(d) < 1e-8) d = d < 0 ? -1e-8 : 1e-8;
        resid[i] /= d;
      }
      corrections.push_back(std::move(resid));
    }
    if (all || used == n) {
      res.vectors = x;
      res.converged = all || used == n;
      if (used == n) {
        // Full space spanned: Ritz pairs are exact up to rounding.
        for (int r = 0; r < k; ++r) res.residuals[r] = (ax.col(r) - res.values[r] * x.col(r)).norm();
      }
      return res;
    }

    if (used + static_cast<Eigen::Index>(corrections.size()) > cap) {
      // Restart from the current Ritz vectors.
      Eigen::MatrixXd keep_v = x, keep_av = ax;
      used = 0;
      for (int r = 0; r < k; ++r) {
        Eigen::VectorXd c = keep_v.col(r);
        const double nrm = orthogonalize(v, used, c);
        if (nrm < 1e-10) continue;
        const double scale = 1.0 / nrm;
        // Ritz vectors are orthonormal already; reuse their images.
        v.col(used) = c * scale;
        av.col(used) = keep_av.col(r) * scale;
        ++used;
      }
    }
    bool grew = false;
    for (auto& c : corrections) {
      if (used >= cap) break;
      grew = add_vector(std::move(c)) || grew;
    }
    if (!grew && used < n) {
      // Preconditioned residuals fell inside the subspace; widen with the
      // unit vector of the largest residual component not yet spanned.
      Eigen::VectorXd resid = ax.col(0) - res.values[0] * x.col(0);
      std::vector<Eigen::Index> order(n);
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(),
                       [&](auto a, auto b) { return std::abs(resid[a]) > std::abs(resid[b]); });
      for (Eigen::Index idx : order)
        if (used < cap && add_vector(Eigen::VectorXd::Unit(n, idx))) break;
    }
  }
  throw ConvergenceError("davidson: no convergence within " + std::to_string(opts.max_iterations) +
                         " iterations (residual " + std::to_string(res.residuals[0]) + ")");
}

}  // namespace qidmrg
