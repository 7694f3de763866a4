#include "qidmrg/cideas.hpp"

#include <algorithm>
#include <bit>
#include <numeric>

namespace qidmrg::cideas {

CasVector build_cas_vector(const std::vector<double>& s1) {
  for (double v : s1)
    if (v < 0.0) throw std::invalid_argument("build_cas_vector: negative entropy");
  CasVector c;
  c.orbitals.resize(s1.size());
  std::iota(c.orbitals.begin(), c.orbitals.end(), 0);
  std::stable_sort(c.orbitals.begin(), c.orbitals.end(), [&](int a, int b) { return s1[a] > s1[b]; });
  return c;
}

CasVector bootstrap_cas_vector(int n) {
  CasVector c;
  for (int i = n - 1; i >= 0; --i) c.orbitals.push_back(i);
  return c;
}

std::vector<int> EnvClassification::of_kind(EnvClass k) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < orbitals.size(); ++i)
    if (kind[i] == k) out.push_back(orbitals[i]);
  return out;
}

EnvClassification classify_environment(const std::vector<int>& hf_occ, const CasVector& casv,
                                       const std::vector<int>& env, int budget) {
  if (budget < 1) throw std::invalid_argument("classify_environment: budget must be positive");
  EnvClassification c;
  c.orbitals = env;
  std::sort(c.orbitals.begin(), c.orbitals.end());
  c.kind.assign(c.orbitals.size(), EnvClass::Empty);
  for (std::size_t i = 0; i < c.orbitals.size(); ++i)
    if (hf_occ.at(c.orbitals[i]) == 2) c.kind[i] = EnvClass::DoublyFilled;
  int active = 0;
  for (int o : casv.orbitals) {
    if (active == budget) break;
    const auto it = std::find(c.orbitals.begin(), c.orbitals.end(), o);
    if (it == c.orbitals.end()) continue;
    c.kind[it - c.orbitals.begin()] = EnvClass::Active;
    ++active;
  }
  return c;
}

void WarmupConfig::validate() const {
  if (ci_level_cap < 0) throw std::invalid_argument("ci_level_cap must be >= 0");
  if (active_budget < 1) throw std::invalid_argument("active_budget must be >= 1");
  if (m_start < 1) throw std::invalid_argument("m_start must be >= 1");
}

std::vector<EnvState> build_environment_basis(const IntegralSet& h, const EnvClassification& cls,
                                              const WarmupConfig& cfg, int m_l, const std::vector<double>& s1,
                                              const CasVector& casv, const std::function<bool(Qn)>& feasible) {
  cfg.validate();
  const int n = h.norb();
  const fci::Det reference = fci::reference_determinant(h.meta());
  fci::Det env_mask = 0, fixed = 0;
  for (int o : cls.orbitals) env_mask |= 3ULL << fci::mode(o, 0);
  for (int o : cls.of_kind(EnvClass::DoublyFilled)) fixed |= 3ULL << fci::mode(o, 0);
  const fci::Det hf = reference & env_mask;
  const std::vector<int> active = cls.of_kind(EnvClass::Active);

  std::vector<double> weight(n, 0.0);
  if (!s1.empty()) {
    weight = s1;
  } else {
    for (std::size_t r = 0; r < casv.orbitals.size(); ++r) weight[casv.orbitals[r]] = static_cast<double>(n - r);
  }

  std::vector<EnvState> states;
  const std::size_t combos = std::size_t{1} << (2 * active.size());
  for (std::size_t c = 0; c < combos; ++c) {
    fci::Det d = fixed;
    for (std::size_t a = 0; a < active.size(); ++a) d |= static_cast<fci::Det>((c >> (2 * a)) & 3ULL) << fci::mode(active[a], 0);
    const int holes = std::popcount(hf & ~d), particles = std::popcount(d & ~hf);
    const int rank = std::max(holes, particles);
    if (rank > cfg.ci_level_cap) continue;
    Qn q;
    for (int o : cls.orbitals) {
      const bool up = (d >> fci::mode(o, 0)) & 1ULL, dn = (d >> fci::mode(o, 1)) & 1ULL;
      q = q + Qn{up + dn, up - dn};
    }
    if (feasible && !feasible(q)) continue;
    double score = 0.0;
    const fci::Det added = d & ~hf;
    for (int m = 0; m < 2 * n; ++m)
      if ((added >> m) & 1ULL) score += weight[m / 2];
    states.push_back({d, q, rank, score});
  }
  if (states.empty()) throw InfeasibleError("build_environment_basis: no admissible environment determinant");
  std::sort(states.begin(), states.end(), [](const EnvState& a, const EnvState& b) {
    if (a.rank != b.rank) return a.rank < b.rank;
    if (a.score != b.score) return a.score > b.score;
    return a.det < b.det;
  });
  const std::size_t keep = static_cast<std::size_t>(std::max(m_l, cfg.m_start));
  if (states.size() > keep) states.resize(keep);
  return states;
}

double doubly_filled_energy_shift(const IntegralSet& h, const std::vector<int>& orbitals) {
  double e = 0.0;
  for (int c : orbitals) {
    e += 2.0 * h.one_body(c, c);
    for (int d : orbitals) e += 2.0 * h.two_body(c, c, d, d) - h.two_body(c, d, d, c);
  }
  return e;
}

}  // namespace qidmrg::cideas
