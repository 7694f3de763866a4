#include "doctest.h"
#include "qidmrg/fci.hpp"
#include "qidmrg/mpo.hpp"

using namespace qidmrg;

namespace {

// Full operator on the 4^n product space, first site most significant.
Eigen::MatrixXd contract(const Mpo& mpo) {
  std::vector<Eigen::MatrixXd> cur(1, Eigen::MatrixXd::Ones(1, 1));
  for (int t = 0; t < mpo.n_sites; ++t) {
    const Eigen::Index dim = cur[0].rows() * 4;
    std::vector<Eigen::MatrixXd> next(mpo.channels(t + 1), Eigen::MatrixXd::Zero(dim, dim));
    for (const auto& e : mpo.site[t])
      for (Eigen::Index r = 0; r < cur[e.from].rows(); ++r)
        for (Eigen::Index c = 0; c < cur[e.from].cols(); ++c)
          if (cur[e.from](r, c) != 0.0) next[e.to].block(4 * r, 4 * c, 4, 4) += cur[e.from](r, c) * e.op;
    cur = std::move(next);
  }
  return cur[0];
}

Eigen::Index product_index(fci::Det d, int n) {
  Eigen::Index idx = 0;
  for (int t = 0; t < n; ++t) idx = 4 * idx + fci::local_state(d, t);
  return idx;
}

}  // namespace

TEST_CASE("local ladder operators") {
  const auto up = local_ladder(0, true), dn = local_ladder(1, true);
  // c+_up c+_dn |0> = |updn>, c+_dn c+_up |0> = -|updn>
  CHECK((up * dn)(3, 0) == 1.0);
  CHECK((dn * up)(3, 0) == -1.0);
  CHECK((up * local_ladder(0, false) + local_ladder(0, false) * up).isIdentity());
  CHECK((up * dn + dn * up).isZero());
}

TEST_CASE("Hamiltonian MPO equals the determinant-space Hamiltonian") {
  for (auto [n, nelec, two_sz, seed] : {std::array{3, 3, 1, 7}, std::array{4, 4, 0, 8}, std::array{4, 3, -1, 9}}) {
    const auto h = build_random(n, nelec, seed);
    const Eigen::MatrixXd full = contract(build_mpo(n, hamiltonian_terms(h)));
    CHECK((full - full.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    const auto sector = fci::enumerate_sector(n, nelec, two_sz);
    const Eigen::MatrixXd ref = fci::hamiltonian_matrix(h, *sector);
    double dev = 0.0;
    for (std::size_t a = 0; a < sector->size(); ++a)
      for (std::size_t b = 0; b < sector->size(); ++b)
        dev = std::max(dev, std::abs(ref(a, b) - full(product_index((*sector)[a], n), product_index((*sector)[b], n))));
    CHECK(dev < 1e-12);
  }
}

TEST_CASE("S^2 MPO matches the oracle") {
  const int n = 3;
  const Eigen::MatrixXd s2 = contract(build_mpo(n, s2_terms(n)));
  const auto sector = fci::enumerate_sector(n, 3, 1);
  Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(static_cast<Eigen::Index>(sector->size()), 0.3, -1.1);
  v.normalize();
  Eigen::VectorXd full = Eigen::VectorXd::Zero(s2.rows());
  for (std::size_t a = 0; a < sector->size(); ++a) full[product_index((*sector)[a], n)] = v[a];
  CHECK(full.dot(s2 * full) == doctest::Approx(fci::expectation_s2({sector, v})).epsilon(1e-12));
}

TEST_CASE("MPO bond dimension stays polynomial") {
  const auto h = build_random(6, 6, 1);
  const auto mpo = build_mpo(6, hamiltonian_terms(h));
  CHECK(mpo.channels(0) == 1);
  CHECK(mpo.channels(6) == 1);
  CHECK(mpo.max_bond() < 400);
}
