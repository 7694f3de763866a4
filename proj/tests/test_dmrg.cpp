#include <cmath>

#include "doctest.h"
#include "qidmrg/dmrg.hpp"
#include "qidmrg/fci.hpp"
#include "qidmrg/measure.hpp"

using namespace qidmrg;

namespace {

fci::Eigenpair exact(const IntegralSet& h) {
  const auto& m = h.meta();
  return fci::ground_state(h, fci::enumerate_sector(m.n_orbitals, m.n_electrons, m.two_sz))[0];
}

SweepConfig tight() {
  SweepConfig cfg;
  cfg.chi = 1e-12;
  cfg.solver_tol = 1e-10;
  cfg.convergence_tol = 1e-9;
  return cfg;
}

}  // namespace

TEST_CASE("DBSS keeps the smallest prefix below the threshold") {
  SweepConfig cfg;
  cfg.m_min = 1;
  cfg.chi = 1e-3;
  SchmidtSpectrum sp{1, {}};
  for (int i = 1; i <= 20; ++i) sp.weights.push_back(std::pow(2.0, -i));
  sp.weights.back() *= 2.0;  // sums to one
  const auto rec = dbss_truncate(sp, cfg);
  // brute force
  const double total = von_neumann(sp.weights);
  int expect = 0;
  for (int m = 1; m <= 20; ++m) {
    std::vector<double> head(sp.weights.begin(), sp.weights.begin() + m);
    double partial = 0.0;
    for (double w : head) partial -= w * std::log(w);
    if (total - partial < cfg.chi) {
      expect = m;
      break;
    }
  }
  CHECK(rec.kept == expect);
  CHECK(rec.info_loss < cfg.chi);
  CHECK(rec.info_loss >= 0.0);
  CHECK(rec.entropy_before == doctest::Approx(total).epsilon(1e-14));
}

TEST_CASE("DBSS extends over degenerate weights and respects floor and cap") {
  SweepConfig cfg;
  cfg.chi = 0.5;
  cfg.m_min = 1;
  SchmidtSpectrum sp{2, {0.25, 0.25, 0.25, 0.25}};
  auto rec = dbss_truncate(sp, cfg);
  CHECK(rec.m_used == 4);
  CHECK(rec.info_loss == doctest::Approx(0.0));

  cfg.m_min = 3;
  cfg.chi = 10.0;
  rec = dbss_truncate({2, {0.7, 0.2, 0.05, 0.05}}, cfg);
  CHECK(rec.m_used == 4);  // floor at 3 extended over the tie

  cfg.m_min = 2;
  cfg.chi = 1e-4;
  rec = dbss_truncate({1, {1.0, 0.0, 0.0, 0.0}}, cfg);
  CHECK(rec.m_used == 2);
  CHECK(rec.info_loss == 0.0);

  cfg.m_min = 1;
  cfg.chi = 1e-6;
  rec = dbss_truncate({3, std::vector<double>(8, 0.125)}, cfg);
  CHECK(rec.m_used == 8);

  cfg.m_cap = 2;
  cfg.chi = 1e-12;
  rec = dbss_truncate({2, {0.4, 0.3, 0.2, 0.1}}, cfg);
  CHECK(rec.m_used == 2);
  CHECK(rec.clamped);
  CHECK(rec.discarded_weight == doctest::Approx(0.3));
}

TEST_CASE("two-orbital system is exact") {
  const auto h = build_random(2, 2, 3);
  const auto res = run_dmrg(h, Permutation::identity(2), tight());
  CHECK(res.energy == doctest::Approx(exact(h).energy).epsilon(1e-10));
  CHECK(res.converged);
}

TEST_CASE("Hubbard chains match the oracle") {
  for (auto [l, u] : {std::pair{4, 1.0}, std::pair{4, 4.0}, std::pair{6, 4.0}, std::pair{6, 0.0}}) {
    CAPTURE(l);
    CAPTURE(u);
    const auto h = build_hubbard(l, 1.0, u);
    const auto res = run_dmrg(h, Permutation::identity(l), tight());
    const auto ref = exact(h);
    CHECK(std::abs(res.energy - ref.energy) < 1e-8);
    CHECK(res.energy >= ref.energy - 1e-10);
    CHECK(res.converged);
    CHECK(std::abs(res.s2) < 1e-6);

    // block entropies of the final sweep against the oracle spectrum
    const auto& be = res.block_entropy.back();
    for (int c = 1; c < l; ++c) CHECK(std::abs(be[c] - von_neumann(fci::block_spectrum(ref.state, c))) < 1e-6);
  }
}

TEST_CASE("random integrals under a permutation match the oracle") {
  const auto h = build_random(6, 6, 11);
  const Permutation p{{3, 0, 5, 1, 4, 2}};
  const auto res = run_dmrg(h, p, tight());
  CHECK(std::abs(res.energy - exact(h).energy) < 1e-8);
}

TEST_CASE("half-sweep energies do not rise once the state is exact") {
  const auto h = build_hubbard(6, 1.0, 1.0);
  auto cfg = tight();
  cfg.max_sweeps = 4;
  cfg.convergence_tol = 1e-15;  // run every sweep
  const auto res = run_dmrg(h, Permutation::identity(6), cfg);
  for (std::size_t k = 2; k < res.half_sweep_energy.size(); ++k)
    CHECK(res.half_sweep_energy[k] <= res.half_sweep_energy[k - 1] + 1e-9);
}

TEST_CASE("naive warm-up reaches the same state") {
  const auto h = build_hubbard(4, 1.0, 4.0);
  Warmup w;
  w.kind = WarmupKind::Naive;
  const auto res = run_dmrg(h, Permutation::identity(4), tight(), w);
  CHECK(std::abs(res.energy - exact(h).energy) < 1e-8);
}

TEST_CASE("dimer cut spectrum") {
  // two decoupled units: the cut between them is a product state
  const auto h = build_dimer_chain(2, 1.0, 0.0, 0.0);
  const auto res = run_dmrg(h, Permutation{{0, 2, 1, 3}}, tight());
  CHECK(res.final_spectra[1].weights[0] == doctest::Approx(1.0).epsilon(1e-8));

  // a symmetric non-interacting dimer splits into four equal weights
  const auto res2 = run_dmrg(build_hubbard(2, 1.0, 0.0), Permutation::identity(2), tight());
  const auto& inner = res2.final_spectra[0].weights;
  REQUIRE(inner.size() >= 4);
  for (int i = 0; i < 4; ++i) CHECK(inner[i] == doctest::Approx(0.25).epsilon(1e-8));
}

TEST_CASE("turning-point RDMs match the oracle") {
  for (auto [l, seed] : {std::pair{2, 5}, std::pair{5, 6}}) {
    const auto h = build_random(l, l, seed);
    const Permutation p = l == 2 ? Permutation{{1, 0}} : Permutation{{2, 4, 0, 3, 1}};
    const auto res = run_dmrg(h, p, tight());
    const auto ref = oracle_rdms(exact(h).state);
    const auto got = to_original_order(measure_turning_point(res.state), p);
    double dev = 0.0;
    for (int i = 0; i < l; ++i) dev = std::max(dev, (got.one[i] - ref.one[i]).cwiseAbs().maxCoeff());
    for (std::size_t k = 0; k < ref.two.size(); ++k) {
      // the overall sign of a pure state is irrelevant; both are quadratic in it
      dev = std::max(dev, (got.two[k] - ref.two[k]).cwiseAbs().maxCoeff());
    }
    CHECK(dev < (l == 2 ? 1e-12 : 1e-7));

    for (int i = 0; i < l; ++i)
      for (int j = i + 1; j < l; ++j) {
        Eigen::Matrix4d ri = Eigen::Matrix4d::Zero(), rj = Eigen::Matrix4d::Zero();
        for (int a = 0; a < 4; ++a)
          for (int b = 0; b < 4; ++b)
            for (int k = 0; k < 4; ++k) {
              ri(a, b) += got.pair(i, j)(4 * a + k, 4 * b + k);
              rj(a, b) += got.pair(i, j)(4 * k + a, 4 * k + b);
            }
        CHECK((ri - got.one[i]).cwiseAbs().maxCoeff() < 1e-10);
        CHECK((rj - got.one[j]).cwiseAbs().maxCoeff() < 1e-10);
      }
  }
}

TEST_CASE("block growth ledger and pure-state symmetry") {
  const auto h = build_random(6, 6, 13);
  auto cfg = tight();
  cfg.chi = 1e-14;
  cfg.m_min = 4096;
  const auto res = run_dmrg(h, Permutation::identity(6), cfg);
  REQUIRE(!res.growth.empty());
  int checked = 0;
  for (const auto& g : res.growth) {
    CHECK(g.growth <= 1e-8);
    CHECK(std::abs(g.s_left - g.s_right) < 1e-10);
    CHECK(std::abs(g.s_block + g.s_site + g.growth - g.s_grown) < 1e-12);
    if (g.s_block_previous >= 0.0 && g.half_sweep == res.growth.back().half_sweep) {  // state has settled
      CHECK(std::abs(g.s_block_previous + g.s_site + g.growth - g.s_grown) < 1e-8);
      ++checked;
    }
  }
  CHECK(checked > 0);
  for (const auto& be : res.block_entropy) {
    CHECK(be.front() == 0.0);
    CHECK(be.back() == 0.0);
  }
}
