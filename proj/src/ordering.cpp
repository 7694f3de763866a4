#include "qidmrg/ordering.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "qidmrg/rng.hpp"

namespace qidmrg {

namespace {

void check_square(const Eigen::MatrixXd& info, int n) {
  if (info.rows() != info.cols()) throw std::invalid_argument("mutual information matrix is not square");
  if (n >= 0 && info.rows() != n) throw std::invalid_argument("mutual information matrix does not match the ordering");
}

double distance_term(int d, double eta) {
  return eta == 2.0 ? double(d) * d : std::pow(double(std::abs(d)), eta);
}

// Cost change from exchanging the orbitals at positions i and j.
double swap_delta(const Eigen::MatrixXd& info, const std::vector<int>& order, const std::vector<int>& pos, int i,
                  int j, double eta) {
  const int a = order[i], b = order[j];
  double d = 0.0;
  for (int c = 0; c < static_cast<int>(order.size()); ++c) {
    if (c == a || c == b) continue;
    const int pc = pos[c];
    const double da = distance_term(j - pc, eta) - distance_term(i - pc, eta);
    d += (info(a, c) - info(b, c)) * da;
  }
  return d;
}

struct Blocks {
  std::vector<int> begin;  // per block, in position order; begin.back() == n

  int of(int position) const {
    return static_cast<int>(std::upper_bound(begin.begin(), begin.end(), position) - begin.begin()) - 1;
  }
  int count() const { return static_cast<int>(begin.size()) - 1; }
};

Blocks find_blocks(const std::vector<int>& labels, const std::vector<int>& order) {
  Blocks b;
  for (int i = 0; i < static_cast<int>(order.size()); ++i)
    if (i == 0 || labels[order[i]] != labels[order[i - 1]]) b.begin.push_back(i);
  b.begin.push_back(static_cast<int>(order.size()));
  return b;
}

std::vector<int> regroup(const std::vector<int>& labels, const std::vector<int>& order) {
  std::vector<int> seen;
  for (int o : order)
    if (std::find(seen.begin(), seen.end(), labels[o]) == seen.end()) seen.push_back(labels[o]);
  std::vector<int> out;
  for (int l : seen)
    for (int o : order)
      if (labels[o] == l) out.push_back(o);
  return out;
}

std::vector<std::vector<int>> components(const Eigen::MatrixXd& info) {
  const int n = static_cast<int>(info.rows());
  const double scale = info.cwiseAbs().maxCoeff();
  std::vector<int> comp(n, -1);
  std::vector<std::vector<int>> out;
  for (int s = 0; s < n; ++s) {
    if (comp[s] >= 0) continue;
    std::vector<int> members{s}, stack{s};
    comp[s] = static_cast<int>(out.size());
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (int w = 0; w < n; ++w)
        if (comp[w] < 0 && w != v && info(v, w) > 1e-14 * scale) {
          comp[w] = comp[s];
          members.push_back(w);
          stack.push_back(w);
        }
    }
    std::sort(members.begin(), members.end());
    out.push_back(std::move(members));
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.size() > b.size(); });
  return out;
}

// Connected case: orbitals sorted by Fiedler entry, cheaper direction.
OrderingResult fiedler_connected(const Eigen::MatrixXd& info, const CostParams& params) {
  const int n = static_cast<int>(info.rows());
  OrderingResult r;
  r.method = OrderingMethod::Fiedler;
  if (n < 3) {
    r.permutation = Permutation::identity(n);
    if (n == 2) {
      r.fiedler = Eigen::Vector2d(-1, 1) / std::sqrt(2.0);
      r.lambda2 = 2 * info(0, 1);
    }
    r.cost = entanglement_distance(info, r.permutation, params);
    return r;
  }
  Eigen::MatrixXd lap = -info;
  lap.diagonal().setZero();
  for (int i = 0; i < n; ++i) lap(i, i) = -lap.row(i).sum();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(lap);
  const auto& ev = es.eigenvalues();
  const double scale = std::max(1.0, std::abs(ev[n - 1]));
  r.lambda2 = ev[1];
  if (ev[2] - ev[1] < 1e-10 * scale) {
    r.degenerate = true;
    r.permutation = Permutation::identity(n);
    r.cost = entanglement_distance(info, r.permutation, params);
    return r;
  }
  Eigen::VectorXd x = es.eigenvectors().col(1);
  x.array() -= x.mean();
  x.normalize();
  r.fiedler = x;
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return x[a] < x[b]; });
  Permutation up{order}, down = Permutation{order}.reversed();
  const double cu = entanglement_distance(info, up, params), cd = entanglement_distance(info, down, params);
  const bool take_down = cd < cu || (cd == cu && down.image < up.image);
  r.permutation = take_down ? down : up;
  r.cost = take_down ? cd : cu;
  return r;
}

}  // namespace

void CostParams::validate() const {
  if (!(eta >= 1.0)) throw std::invalid_argument("eta must be at least 1");
}

std::string to_string(OrderingMethod m) {
  switch (m) {
    case OrderingMethod::Anneal: return "anneal";
    case OrderingMethod::Fiedler: return "fiedler";
    case OrderingMethod::Brute: return "brute";
    case OrderingMethod::Input: return "input";
  }
  return "input";
}

double entanglement_distance(const Eigen::MatrixXd& info, const Permutation& p, const CostParams& params) {
  params.validate();
  check_square(info, p.size());
  const int n = p.size();
  std::vector<int> pos(n);
  for (int i = 0; i < n; ++i) pos[p.image[i]] = i;
  // orbital-pair order keeps the sum bitwise invariant under reversal
  double cost = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) cost += info(a, b) * distance_term(pos[b] - pos[a], params.eta);
  return cost;
}

bool irreps_contiguous(const std::vector<int>& labels, const Permutation& p) {
  std::vector<int> done;
  for (int i = 0; i < p.size(); ++i) {
    const int l = labels.at(p.image[i]);
    if (i > 0 && l == labels.at(p.image[i - 1])) continue;
    if (std::find(done.begin(), done.end(), l) != done.end()) return false;
    done.push_back(l);
  }
  return true;
}

OrderingResult optimize_ordering(const Eigen::MatrixXd& info, const Permutation& start,
                                 const IrrepConstraint& constraint, const CostParams& params,
                                 const AnnealSchedule& schedule) {
  params.validate();
  check_square(info, start.size());
  if (!start.is_valid()) throw std::invalid_argument("optimize_ordering: start is not a permutation");
  const int n = start.size();
  if (constraint.enabled && static_cast<int>(constraint.labels.size()) != n)
    throw std::invalid_argument("optimize_ordering: irrep labels do not match the orbital count");

  std::vector<int> order = start.image;
  if (constraint.enabled && !irreps_contiguous(constraint.labels, start)) order = regroup(constraint.labels, order);
  Blocks blocks;
  if (constraint.enabled) blocks = find_blocks(constraint.labels, order);
  else blocks.begin = {0, n};

  OrderingResult r;
  r.method = OrderingMethod::Anneal;
  r.seed = schedule.seed;
  r.permutation = Permutation{order};
  r.cost = entanglement_distance(info, r.permutation, params);

  bool can_swap = false;
  for (int k = 0; k < blocks.count(); ++k) can_swap |= blocks.begin[k + 1] - blocks.begin[k] > 1;
  const bool can_exchange = blocks.count() > 1;
  if (!can_swap && !can_exchange) return r;

  std::vector<int> pos(n);
  const auto sync = [&] {
    for (int i = 0; i < n; ++i) pos[order[i]] = i;
  };
  sync();
  Rng rng(schedule.seed);

  struct Move {
    bool exchange;
    int i, j;  // positions, or block index i for an exchange
  };
  const auto propose = [&]() -> Move {
    const bool exchange = can_exchange && (!can_swap || uniform01(rng) < 0.5);
    if (exchange) return {true, static_cast<int>(bounded(rng, blocks.count() - 1)), 0};
    for (;;) {
      const int i = static_cast<int>(bounded(rng, n));
      const int k = blocks.of(i);
      const int lo = blocks.begin[k], size = blocks.begin[k + 1] - lo;
      if (size < 2) continue;
      int j = lo + static_cast<int>(bounded(rng, size - 1));
      if (j >= i) ++j;
      return {false, i, j};
    }
  };
  const auto exchanged = [&](int k) {
    std::vector<int> o = order;
    const int a = blocks.begin[k], b = blocks.begin[k + 1], c = blocks.begin[k + 2];
    std::rotate(o.begin() + a, o.begin() + b, o.begin() + c);
    return o;
  };
  double current = r.cost;
  const auto delta_of = [&](const Move& m, std::vector<int>* moved) {
    if (!m.exchange) return swap_delta(info, order, pos, m.i, m.j, params.eta);
    *moved = exchanged(m.i);
    return entanglement_distance(info, Permutation{*moved}, params) - current;
  };

  // Initial temperature: mean uphill step of random moves from the start.
  double uphill = 0.0;
  int n_uphill = 0;
  std::vector<int> scratch;
  for (int s = 0; s < 200; ++s) {
    const double d = delta_of(propose(), &scratch);
    if (d > 0) {
      uphill += d;
      ++n_uphill;
    }
  }
  if (n_uphill == 0 || uphill == 0.0) return r;
  const double t0 = uphill / n_uphill;
  const long iters = schedule.iterations > 0 ? schedule.iterations : 10000L * n;
  const double cool = std::pow(schedule.cooling_range, 1.0 / static_cast<double>(iters));

  std::vector<int> best = order;
  double best_cost = current, temp = t0;
  for (long it = 0; it < iters; ++it, temp *= cool) {
    const Move m = propose();
    const double d = delta_of(m, &scratch);
    if (d > 0 && uniform01(rng) >= std::exp(-d / temp)) continue;
    if (m.exchange) {
      order = scratch;
      blocks = find_blocks(constraint.labels, order);
    } else {
      std::swap(order[m.i], order[m.j]);
    }
    sync();
    current += d;
    if (current < best_cost - 1e-12 * std::abs(best_cost)) {
      best_cost = current;
      best = order;
    }
  }
  const Permutation candidate{best};
  const double c = entanglement_distance(info, candidate, params);
  if (c < r.cost) {
    r.permutation = candidate;
    r.cost = c;
  }
  return r;
}

OrderingResult fiedler_ordering(const Eigen::MatrixXd& info, const CostParams& params) {
  params.validate();
  check_square(info, -1);
  if ((info - info.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, info.cwiseAbs().maxCoeff()) ||
      (info.array() < 0).any())
    throw std::invalid_argument("fiedler_ordering: matrix must be symmetric and non-negative");
  const auto comps = components(info);
  if (comps.size() <= 1) return fiedler_connected(info, params);

  OrderingResult r;
  r.method = OrderingMethod::Fiedler;
  r.disconnected = true;
  std::vector<int> order;
  for (const auto& c : comps) {
    const int m = static_cast<int>(c.size());
    Eigen::MatrixXd sub(m, m);
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) sub(a, b) = info(c[a], c[b]);
    const auto part = fiedler_connected(sub, params);
    for (int v : part.permutation.image) order.push_back(c[v]);
  }
  r.permutation = Permutation{order};
  r.cost = entanglement_distance(info, r.permutation, params);
  return r;
}

OrderingResult brute_force_ordering(const Eigen::MatrixXd& info, const CostParams& params) {
  params.validate();
  check_square(info, -1);
  const int n = static_cast<int>(info.rows());
  if (n > kBruteForceCap)
    throw std::invalid_argument("brute_force_ordering: " + std::to_string(n) + " orbitals exceed the cap of " +
                                std::to_string(kBruteForceCap));
  OrderingResult r;
  r.method = OrderingMethod::Brute;
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  r.permutation = Permutation{p};
  r.cost = entanglement_distance(info, r.permutation, params);
  if (n < 3) return r;
  do {
    if (p.front() > p.back()) continue;
    const Permutation q{p};
    const double c = entanglement_distance(info, q, params);
    if (c < r.cost) {
      r.cost = c;
      r.permutation = q;
    }
  } while (std::next_permutation(p.begin(), p.end()));
  return r;
}

}  // namespace qidmrg
