#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "qidmrg/ordering.hpp"
#include "qidmrg/rng.hpp"

using namespace qidmrg;

namespace {

Eigen::MatrixXd random_info(int n, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) m(i, j) = m(j, i) = std::pow(uniform01(rng), 3);
  return m;
}

Eigen::MatrixXd path(int n) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) m(i, i + 1) = m(i + 1, i) = 1.0;
  return m;
}

}  // namespace

TEST_CASE("entanglement distance") {
  const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(3, 3);
  CHECK(entanglement_distance(zero, Permutation::identity(3)) == 0.0);
  Eigen::MatrixXd one = zero;
  one(0, 1) = one(1, 0) = 0.5;
  CHECK(entanglement_distance(one, Permutation::identity(3)) == 0.5);
  CHECK(entanglement_distance(one, Permutation{{0, 2, 1}}) == 2.0);

  const auto m = random_info(5, 3);
  const Permutation p{{4, 1, 0, 3, 2}};
  std::vector<int> at(5);
  for (int i = 0; i < 5; ++i) at[p.image[i]] = i;
  for (double eta : {1.0, 2.0}) {
    double full = 0.0;
    for (int a = 0; a < 5; ++a)
      for (int b = 0; b < 5; ++b) full += m(a, b) * std::pow(std::abs(at[a] - at[b]), eta);
    CHECK(std::abs(entanglement_distance(m, p, {eta}) - 0.5 * full) < 1e-12);
    CHECK(entanglement_distance(m, p, {eta}) == entanglement_distance(m, p.reversed(), {eta}));
    CHECK(entanglement_distance(3.0 * m, p, {eta}) == doctest::Approx(3.0 * entanglement_distance(m, p, {eta})));
  }
  CHECK_THROWS(entanglement_distance(m, Permutation::identity(4)));
  CHECK_THROWS(entanglement_distance(m, p, {0.5}));
}

TEST_CASE("brute force") {
  const auto r = brute_force_ordering(Eigen::MatrixXd::Zero(4, 4));
  CHECK(r.cost == 0.0);
  CHECK(r.permutation == Permutation::identity(4));
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(3, 3);
  m(0, 2) = m(2, 0) = 1.0;
  CHECK(brute_force_ordering(m).cost == 1.0);
  CHECK_THROWS_AS(brute_force_ordering(Eigen::MatrixXd::Zero(10, 10)), std::invalid_argument);
}

TEST_CASE("annealing on zero and random inputs") {
  const Permutation start{{2, 0, 1, 3}};
  const auto z = optimize_ordering(Eigen::MatrixXd::Zero(4, 4), start);
  CHECK(z.permutation == start);
  CHECK(z.cost == 0.0);

  int hits = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto m = random_info(7, 100 + s);
    const auto best = brute_force_ordering(m);
    AnnealSchedule sch;
    sch.seed = s;
    const auto a = optimize_ordering(m, Permutation::identity(7), {}, {}, sch);
    CHECK(a.cost >= best.cost - 1e-12);
    CHECK(a.cost <= entanglement_distance(m, Permutation::identity(7)));
    CHECK(a.cost == entanglement_distance(m, a.permutation));
    hits += a.cost <= best.cost + 1e-12;
    CHECK(best.cost <= fiedler_ordering(m).cost + 1e-12);
  }
  CHECK(hits >= 16);

  const auto m = random_info(6, 9);
  AnnealSchedule sch;
  sch.seed = 42;
  CHECK(optimize_ordering(m, Permutation::identity(6), {}, {}, sch).permutation ==
        optimize_ordering(m, Permutation::identity(6), {}, {}, sch).permutation);
}

TEST_CASE("constrained annealing keeps irreps together") {
  // two irreps, all entanglement inside each
  const std::vector<int> labels{1, 2, 1, 2, 1, 2, 1, 2};
  Eigen::MatrixXd m = random_info(8, 17);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j)
      if (labels[i] != labels[j]) m(i, j) = 0.0;
  const auto r = optimize_ordering(m, Permutation::identity(8), {true, labels});
  CHECK(irreps_contiguous(labels, r.permutation));

  double per_irrep = 0.0;
  for (int l : {1, 2}) {
    std::vector<int> idx;
    for (int i = 0; i < 8; ++i)
      if (labels[i] == l) idx.push_back(i);
    Eigen::MatrixXd sub(4, 4);
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) sub(a, b) = m(idx[a], idx[b]);
    per_irrep += brute_force_ordering(sub).cost;
  }
  CHECK(r.cost == doctest::Approx(per_irrep).epsilon(1e-12));
}

TEST_CASE("Fiedler ordering") {
  const auto p = fiedler_ordering(path(6));
  CHECK((p.permutation == Permutation::identity(6) || p.permutation == Permutation::identity(6).reversed()));
  CHECK(p.cost == entanglement_distance(path(6), Permutation::identity(6)));

  const auto m = random_info(7, 5);
  const auto f = fiedler_ordering(m);
  REQUIRE(f.fiedler.size() == 7);
  CHECK(std::abs(f.fiedler.sum()) < 1e-8);
  CHECK(std::abs(f.fiedler.norm() - 1.0) < 1e-8);
  Eigen::MatrixXd lap = -m;
  for (int i = 0; i < 7; ++i) lap(i, i) = m.row(i).sum();
  CHECK((lap * f.fiedler - f.lambda2 * f.fiedler).norm() < 1e-8);
  CHECK((lap * Eigen::VectorXd::Ones(7)).norm() < 1e-12);
  for (int i = 1; i < 7; ++i) CHECK(f.fiedler[f.permutation.image[i - 1]] * (f.fiedler[f.permutation.image[6]] > f.fiedler[f.permutation.image[0]] ? 1 : -1) <=
                                    f.fiedler[f.permutation.image[i]] * (f.fiedler[f.permutation.image[6]] > f.fiedler[f.permutation.image[0]] ? 1 : -1));

  Eigen::MatrixXd pairs = Eigen::MatrixXd::Zero(4, 4);
  pairs(0, 1) = pairs(1, 0) = 1.0;
  pairs(2, 3) = pairs(3, 2) = 0.5;
  const auto d = fiedler_ordering(pairs);
  CHECK(d.disconnected);
  std::vector<int> at(4);
  for (int i = 0; i < 4; ++i) at[d.permutation.image[i]] = i;
  CHECK(std::abs(at[0] - at[1]) == 1);
  CHECK(std::abs(at[2] - at[3]) == 1);

  Eigen::MatrixXd full = Eigen::MatrixXd::Constant(5, 5, 0.3);
  full.diagonal().setZero();
  const auto u = fiedler_ordering(full);
  CHECK(u.degenerate);
  CHECK(u.permutation == Permutation::identity(5));
}
