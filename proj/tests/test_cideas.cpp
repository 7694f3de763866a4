#include "doctest.h"
#include "qidmrg/cideas.hpp"
#include "qidmrg/dmrg.hpp"

using namespace qidmrg;
using namespace qidmrg::cideas;

TEST_CASE("CAS vector from entropies") {
  CHECK(build_cas_vector({0.1, 0.9, 0.5}).orbitals == std::vector<int>{1, 2, 0});
  CHECK(build_cas_vector({0.5, 0.5, 0.5}).orbitals == std::vector<int>{0, 1, 2});
  CHECK(bootstrap_cas_vector(4).orbitals == std::vector<int>{3, 2, 1, 0});
  CHECK_THROWS_AS(build_cas_vector({0.1, -0.2}), std::invalid_argument);
}

TEST_CASE("environment classification") {
  const std::vector<int> hf{2, 2, 0, 0};
  auto c = classify_environment(hf, {{2, 1, 3, 0}}, {2, 3}, 2);
  CHECK(c.of_kind(EnvClass::Active) == std::vector<int>{2, 3});

  c = classify_environment(hf, {{2, 1, 3, 0}}, {1, 2, 3}, 1);
  CHECK(c.of_kind(EnvClass::Active) == std::vector<int>{2});
  CHECK(c.of_kind(EnvClass::DoublyFilled) == std::vector<int>{1});
  CHECK(c.of_kind(EnvClass::Empty) == std::vector<int>{3});

  c = classify_environment(hf, bootstrap_cas_vector(4), {0, 1, 2, 3}, 9);
  CHECK(c.of_kind(EnvClass::Active).size() == 4);
}

TEST_CASE("environment bases") {
  const auto h = build_random(2, 2, 4);
  const auto cls = classify_environment({2, 0}, bootstrap_cas_vector(2), {0, 1}, 2);
  const auto in_sector = [](Qn q) { return q == Qn{2, 0}; };

  WarmupConfig cfg;
  cfg.ci_level_cap = 0;
  auto states = build_environment_basis(h, cls, cfg, 1, {}, bootstrap_cas_vector(2), in_sector);
  REQUIRE(states.size() == 1);
  CHECK(states[0].det == fci::reference_determinant(h.meta()));
  CHECK(states[0].rank == 0);

  cfg.ci_level_cap = 2;
  states = build_environment_basis(h, cls, cfg, 1, {}, bootstrap_cas_vector(2), in_sector);
  CHECK(states.size() == 4);
  for (const auto& s : states) CHECK(s.qn == Qn{2, 0});

  cfg.m_start = 2;
  CHECK(build_environment_basis(h, cls, cfg, 1, {}, bootstrap_cas_vector(2), in_sector).size() == 2);
  CHECK(build_environment_basis(h, cls, cfg, 3, {}, bootstrap_cas_vector(2), in_sector).size() == 3);

  const auto none = [](Qn q) { return q == Qn{7, 1}; };
  CHECK_THROWS_AS(build_environment_basis(h, cls, cfg, 1, {}, bootstrap_cas_vector(2), none), InfeasibleError);
}

TEST_CASE("doubly filled shift is the closed-shell energy") {
  const auto h = build_random(4, 4, 5);
  const fci::Det d = 0b00110011;  // orbitals 0 and 2 doubly occupied
  CHECK(doubly_filled_energy_shift(h, {0, 2}) + h.core_energy() ==
        doctest::Approx(fci::determinant_energy(h, d)).epsilon(1e-12));
}

TEST_CASE("CI-DEAS warm-up is at or below the reference energy") {
  for (double u : {1.0, 4.0}) {
    const auto h = build_hubbard(6, 1.0, u);
    SweepConfig cfg;
    cfg.max_sweeps = 1;
    const auto res = run_dmrg(h, Permutation::identity(6), cfg);
    CHECK(res.half_sweep_energy[0] <= fci::determinant_energy(h, fci::reference_determinant(h.meta())) + 1e-12);
  }
}
