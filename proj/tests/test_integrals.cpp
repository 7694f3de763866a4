#include <sstream>

#include "doctest.h"
#include "qidmrg/integrals.hpp"
#include "qidmrg/rng.hpp"

using namespace qidmrg;

namespace {

bool identical(const IntegralSet& a, const IntegralSet& b) {
  return a.norb() == b.norb() && a.one_body_matrix() == b.one_body_matrix() &&
         a.two_body_table() == b.two_body_table() && a.core_energy() == b.core_energy() &&
         a.meta().irrep == b.meta().irrep && a.meta().hf_occupation == b.meta().hf_occupation &&
         a.meta().energy_order == b.meta().energy_order;
}

Permutation random_permutation(int n, std::uint64_t seed) {
  Rng rng(seed);
  Permutation p = Permutation::identity(n);
  for (int i = n - 1; i > 0; --i) std::swap(p.image[i], p.image[bounded(rng, i + 1)]);
  return p;
}

}  // namespace

TEST_CASE("parse_fcidump reads a diagonal two-orbital file") {
  const auto h = parse_fcidump_string(
      " &FCI NORB=2,NELEC=2,MS2=0,\n  ORBSYM=1,1,\n  ISYM=1,\n &END\n"
      " -1.0 1 1 0 0\n -1.0 2 2 0 0\n 0.0 0 0 0 0\n");
  CHECK(h.norb() == 2);
  CHECK(h.meta().n_electrons == 2);
  CHECK(h.one_body(0, 0) == -1.0);
  CHECK(h.one_body(1, 1) == -1.0);
  CHECK(h.one_body(0, 1) == 0.0);
  CHECK(h.core_energy() == 0.0);
  for (double v : h.two_body_table()) CHECK(v == 0.0);
  CHECK(h.meta().hf_occupation == std::vector<int>{2, 0});
}

TEST_CASE("two-body entries expand over the permutational images") {
  const auto h = parse_fcidump_string(
      "&FCI NORB=3, NELEC=2, MS2=0 /\n"
      "0.5 1 1 1 1\n"
      "0.25 2 1 3 1\n");
  CHECK(h.two_body(0, 0, 0, 0) == 0.5);
  for (auto [i, j, k, l] : {std::array{1, 0, 2, 0}, std::array{0, 1, 2, 0}, std::array{1, 0, 0, 2},
                            std::array{0, 1, 0, 2}, std::array{2, 0, 1, 0}, std::array{0, 2, 1, 0},
                            std::array{2, 0, 0, 1}, std::array{0, 2, 0, 1}})
    CHECK(h.two_body(i, j, k, l) == 0.25);
  CHECK(h.two_body(1, 2, 0, 0) == 0.0);
  CHECK(h.symmetry_defect() == 0.0);
}

TEST_CASE("parse_fcidump error paths") {
  const std::string head = "&FCI NORB=2,NELEC=2,MS2=0,ORBSYM=1,1 &END\n";
  SUBCASE("index out of range") {
    try {
      parse_fcidump_string(head + "-1.0 1 1 0 0\n0.1 3 1 0 0\n");
      FAIL("expected a ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 3);
    }
  }
  SUBCASE("conflicting duplicate") {
    try {
      parse_fcidump_string(head + "0.3 1 2 1 1\n0.3000001 2 1 1 1\n");
      FAIL("expected a ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 3);
    }
  }
  SUBCASE("agreeing duplicate is accepted") {
    const auto h = parse_fcidump_string(head + "0.3 1 2 1 1\n0.3 1 1 2 1\n");
    CHECK(h.two_body(1, 0, 0, 0) == 0.3);
  }
  SUBCASE("missing NORB") { CHECK_THROWS_AS(parse_fcidump_string("&FCI NELEC=2 &END\n"), ParseError); }
  SUBCASE("no header") { CHECK_THROWS_AS(parse_fcidump_string("1.0 1 1 0 0\n"), ParseError); }
  SUBCASE("unterminated header") { CHECK_THROWS_AS(parse_fcidump_string("&FCI NORB=2,NELEC=2\n"), ParseError); }
  SUBCASE("ORBSYM length") {
    CHECK_THROWS_AS(parse_fcidump_string("&FCI NORB=2,NELEC=2,ORBSYM=1 &END\n"), ParseError);
  }
  SUBCASE("garbage value") { CHECK_THROWS_AS(parse_fcidump_string(head + "abc 1 1 0 0\n"), ParseError); }
}

TEST_CASE("Fortran exponents and orbital-energy lines") {
  const auto h = parse_fcidump_string("&FCI NORB=1,NELEC=2 &END\n 1.5D-01 1 1 1 1\n -0.5 1 0 0 0\n 2.0d0 0 0 0 0\n");
  CHECK(h.two_body(0, 0, 0, 0) == doctest::Approx(0.15).epsilon(1e-15));
  CHECK(h.one_body(0, 0) == 0.0);
  CHECK(h.core_energy() == 2.0);
}

TEST_CASE("FCIDUMP write/parse round trip is exact") {
  const auto h = build_random(5, 4, 11);
  const std::string text = fcidump_string(h);
  const auto back = parse_fcidump_string(text);
  CHECK(back.one_body_matrix() == h.one_body_matrix());
  CHECK(back.two_body_table() == h.two_body_table());
  CHECK(fcidump_string(back) == text);
}

TEST_CASE("JSON fixtures round trip") {
  const auto h = apply_permutation(build_random(4, 4, 5), Permutation{{2, 0, 3, 1}});
  const auto back = integrals_from_json(nlohmann::json::parse(to_json(h).dump()));
  CHECK(identical(h, back));
}

TEST_CASE("build_hubbard tables") {
  const auto h = build_hubbard(2, 1.0, 0.0);
  CHECK(h.one_body(0, 1) == -1.0);
  CHECK(h.one_body(1, 0) == -1.0);
  CHECK(h.one_body(0, 0) == 0.0);
  for (double v : h.two_body_table()) CHECK(v == 0.0);
  const auto u = build_hubbard(3, 1.0, 4.0);
  CHECK(u.two_body(1, 1, 1, 1) == 4.0);
  CHECK(coulomb_coefficient(u, 1, 1, 1, 1) == 2.0);
  CHECK(u.meta().irrep == std::vector<int>{1, 1, 1});
  CHECK_THROWS(build_hubbard(0, 1.0, 1.0));
}

TEST_CASE("apply_permutation") {
  const auto h = build_random(6, 6, 3);
  CHECK(identical(apply_permutation(h, Permutation::identity(6)), h));

  Permutation swap12 = Permutation::identity(6);
  std::swap(swap12.image[0], swap12.image[1]);
  CHECK(identical(apply_permutation(apply_permutation(h, swap12), swap12), h));

  const auto p = random_permutation(6, 1), q = random_permutation(6, 2);
  CHECK(identical(apply_permutation(h, compose(p, q)), apply_permutation(apply_permutation(h, q), p)));

  const auto hp = apply_permutation(h, p);
  CHECK(hp.one_body(2, 4) == h.one_body(p.image[2], p.image[4]));
  CHECK(hp.two_body(0, 3, 5, 1) == h.two_body(p.image[0], p.image[3], p.image[5], p.image[1]));
  CHECK(hp.meta().hf_occupation[0] == h.meta().hf_occupation[p.image[0]]);
  CHECK(hp.core_energy() == h.core_energy());

  CHECK_THROWS(apply_permutation(h, Permutation::identity(5)));
  CHECK_THROWS(apply_permutation(h, Permutation{{0, 0, 1, 2, 3, 4}}));
}

TEST_CASE("Permutation helpers") {
  const Permutation p{{2, 0, 1}};
  CHECK(p.is_valid());
  CHECK(compose(p, p.inverse()) == Permutation::identity(3));
  CHECK(p.reversed().image == std::vector<int>{1, 0, 2});
}
