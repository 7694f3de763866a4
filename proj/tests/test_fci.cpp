#include <cmath>

#include "doctest.h"
#include "qidmrg/fci.hpp"

using namespace qidmrg;
using namespace qidmrg::fci;

namespace {

double ground_energy(const IntegralSet& h) {
  const auto& m = h.meta();
  return ground_state(h, enumerate_sector(m.n_orbitals, m.n_electrons, m.two_sz)).front().energy;
}

Eigen::MatrixXd trace_second(const Eigen::MatrixXd& rho2) {
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(4, 4);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c) r(a, b) += rho2(4 * a + c, 4 * b + c);
  return r;
}

Eigen::MatrixXd trace_first(const Eigen::MatrixXd& rho2) {
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(4, 4);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c) r(a, b) += rho2(4 * c + a, 4 * c + b);
  return r;
}

}  // namespace

TEST_CASE("sector enumeration") {
  CHECK(enumerate_sector(6, 6, 0)->size() == 400);
  CHECK(enumerate_sector(2, 2, 2)->size() == 1);
  CHECK(enumerate_sector(4, 3, 1)->size() == 24);
  CHECK_THROWS_AS(enumerate_sector(2, 5, 1), std::invalid_argument);
  CHECK_THROWS_AS(enumerate_sector(2, 2, 1), std::invalid_argument);
  const auto s = enumerate_sector(3, 2, 0);
  for (std::size_t i = 0; i < s->size(); ++i) CHECK(s->find((*s)[i]) == static_cast<std::ptrdiff_t>(i));
  CHECK(s->find(0b0101) == -1);
}

TEST_CASE("closed-form Hubbard energies") {
  CHECK(ground_energy(build_hubbard(1, 1.0, 4.0, 2)) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(ground_energy(build_hubbard(2, 1.0, 4.0)) == doctest::Approx(2.0 - std::sqrt(8.0)).epsilon(1e-10));
  CHECK(ground_energy(build_hubbard(2, 1.0, 0.0)) == doctest::Approx(-2.0).epsilon(1e-10));
  // U = 0: sum of the lowest tight-binding levels, -2 t cos(k pi / (L + 1)).
  const int l = 6;
  double e0 = 0.0;
  for (int k = 1; k <= l / 2; ++k) e0 += 2 * -2.0 * std::cos(k * M_PI / (l + 1));
  CHECK(ground_energy(build_hubbard(l, 1.0, 0.0)) == doctest::Approx(e0).epsilon(1e-10));
}

TEST_CASE("Davidson agrees with dense diagonalization") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto h = build_random(4, 4, seed);
    const auto sector = enumerate_sector(4, 4, 0);
    const Eigen::MatrixXd m = hamiltonian_matrix(h, *sector);
    CHECK((m - m.transpose()).cwiseAbs().maxCoeff() < 1e-14);
    const Eigen::VectorXd d = hamiltonian_diagonal(h, *sector);
    CHECK((d - m.diagonal()).cwiseAbs().maxCoeff() < 1e-13);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    const auto pairs = ground_state(h, sector, 3);
    for (int r = 0; r < 3; ++r) CHECK(pairs[r].energy == doctest::Approx(es.eigenvalues()[r]).epsilon(1e-10));
    CHECK(pairs[0].residual < 1e-8);
  }
}

TEST_CASE("matrix-free product matches the dense matrix") {
  const auto h = build_random(5, 4, 9);
  const auto sector = enumerate_sector(5, 4, 2);
  const Eigen::MatrixXd m = hamiltonian_matrix(h, *sector);
  Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(static_cast<Eigen::Index>(sector->size()), -1.0, 2.0), y;
  apply_hamiltonian(h, *sector, x, y);
  CHECK((y - m * x).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("energy is invariant under orbital permutations") {
  const auto h = build_random(6, 6, 4);
  const double e = ground_energy(h);
  for (const auto& img : {std::vector<int>{5, 4, 3, 2, 1, 0}, std::vector<int>{1, 3, 5, 0, 2, 4}}) {
    CHECK(ground_energy(apply_permutation(h, Permutation{img})) == doctest::Approx(e).epsilon(1e-10));
  }
}

TEST_CASE("orbital density matrices") {
  const auto h = build_hubbard(2, 1.0, 0.0);
  const auto gs = ground_state(h, enumerate_sector(2, 2, 0)).front();
  const auto rho = subset_rdm(gs.state, {0});
  CHECK((rho.matrix - 0.25 * Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-10);

  const auto r = build_random(5, 4, 6);
  const auto st = ground_state(r, enumerate_sector(5, 4, 0)).front().state;
  for (auto [i, j] : {std::pair{0, 1}, std::pair{1, 4}, std::pair{2, 3}}) {
    const auto two = subset_rdm(st, {j, i});
    CHECK(two.orbitals == std::vector<int>{i, j});
    CHECK(two.matrix.trace() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK((two.matrix - two.matrix.transpose()).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((trace_second(two.matrix) - subset_rdm(st, {i}).matrix).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((trace_first(two.matrix) - subset_rdm(st, {j}).matrix).cwiseAbs().maxCoeff() < 1e-12);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(two.matrix);
    CHECK(es.eigenvalues().minCoeff() > -1e-12);
  }
  CHECK_THROWS(subset_rdm(st, {1, 1}));
}

TEST_CASE("two-orbital RDM sign for a hopping coherence") {
  // (c+_0up + c+_1up)/sqrt2 |0>: coherence between |up,0> and |0,up>.
  const auto basis = enumerate_sector(2, 1, 1);
  WaveVector psi{basis, Eigen::VectorXd::Constant(2, std::sqrt(0.5))};
  const auto two = subset_rdm(psi, {0, 1});
  CHECK(two.matrix(4 * 2 + 0, 4 * 0 + 2) == doctest::Approx(0.5));
}

TEST_CASE("total spin") {
  const auto singlet = ground_state(build_hubbard(2, 1.0, 4.0), enumerate_sector(2, 2, 0)).front();
  CHECK(expectation_s2(singlet.state) == doctest::Approx(0.0).epsilon(1e-10));
  const auto triplet = enumerate_sector(2, 2, 2);
  CHECK(expectation_s2(WaveVector{triplet, Eigen::VectorXd::Ones(1)}) == doctest::Approx(2.0));
  const auto doublet = enumerate_sector(1, 1, 1);
  CHECK(expectation_s2(WaveVector{doublet, Eigen::VectorXd::Ones(1)}) == doctest::Approx(0.75));
  // Open-shell Sz = 0 determinant mixes singlet and triplet.
  const auto open = enumerate_sector(2, 2, 0);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(open->size()));
  v[open->find((1ULL << mode(0, 0)) | (1ULL << mode(1, 1)))] = 1.0;
  CHECK(expectation_s2(WaveVector{open, v}) == doctest::Approx(1.0));
}

TEST_CASE("block spectrum") {
  const auto st = ground_state(build_hubbard(4, 1.0, 1.0), enumerate_sector(4, 4, 0)).front().state;
  const auto w = block_spectrum(st, 2);
  double sum = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    sum += w[i];
    if (i) CHECK(w[i] <= w[i - 1] + 1e-15);
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  const auto w1 = block_spectrum(st, 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(subset_rdm(st, {0}).matrix);
  std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + 4);
  std::sort(ev.rbegin(), ev.rend());
  for (std::size_t i = 0; i < w1.size(); ++i) CHECK(w1[i] == doctest::Approx(ev[i]).epsilon(1e-10));
}

TEST_CASE("reference determinant") {
  const auto h = build_random(4, 3, 1);
  const Det d = reference_determinant(h.meta());
  CHECK(std::popcount(d) == 3);
  const auto sector = enumerate_sector(4, 3, 1);
  CHECK(sector->find(d) >= 0);
  const Eigen::VectorXd diag = hamiltonian_diagonal(h, *sector);
  CHECK(determinant_energy(h, d) == doctest::Approx(diag[sector->find(d)]).epsilon(1e-13));
}
