#include "qidmrg/integrals.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "qidmrg/rng.hpp"

namespace qidmrg {

std::vector<int> aufbau_occupation(const std::vector<int>& energy_order, int n_up, int n_down) {
  std::vector<int> occ(energy_order.size(), 0);
  for (std::size_t i = 0; i < energy_order.size(); ++i) {
    occ[i] = (energy_order[i] < n_up ? 1 : 0) + (energy_order[i] < n_down ? 1 : 0);
  }
  return occ;
}

IntegralSet::IntegralSet(OrbitalMeta meta, Eigen::MatrixXd one_body, std::vector<double> two_body,
                         double core)
    : meta_(std::move(meta)), one_body_(std::move(one_body)), two_body_(std::move(two_body)), core_(core) {
  const int n = meta_.n_orbitals;
  if (n < 1) throw std::invalid_argument("IntegralSet: need at least one orbital");
  if (one_body_.rows() != n || one_body_.cols() != n)
    throw std::invalid_argument("IntegralSet: one-body table has wrong shape");
  const std::size_t n4 = static_cast<std::size_t>(n) * n * n * n;
  if (two_body_.size() != n4) throw std::invalid_argument("IntegralSet: two-body table has wrong size");
  if (meta_.irrep.empty()) meta_.irrep.assign(n, 1);
  if (meta_.energy_order.empty()) {
    meta_.energy_order.resize(n);
    std::iota(meta_.energy_order.begin(), meta_.energy_order.end(), 0);
  }
  if (static_cast<int>(meta_.irrep.size()) != n || static_cast<int>(meta_.energy_order.size()) != n)
    throw std::invalid_argument("IntegralSet: metadata length differs from orbital count");
  if (meta_.n_electrons < 0 || meta_.n_electrons > 2 * n)
    throw std::invalid_argument("IntegralSet: electron count out of range");
  if (std::abs(meta_.two_sz) > meta_.n_electrons || (meta_.n_electrons + meta_.two_sz) % 2 != 0)
    throw std::invalid_argument("IntegralSet: inconsistent MS2 for the electron count");
  if (meta_.n_up() > n || meta_.n_down() > n)
    throw std::invalid_argument("IntegralSet: too many electrons of one spin");
  if (meta_.hf_occupation.empty())
    meta_.hf_occupation = aufbau_occupation(meta_.energy_order, meta_.n_up(), meta_.n_down());
  if (static_cast<int>(meta_.hf_occupation.size()) != n)
    throw std::invalid_argument("IntegralSet: occupation length differs from orbital count");
  int total = 0;
  for (int o : meta_.hf_occupation) {
    if (o < 0 || o > 2) throw std::invalid_argument("IntegralSet: occupations must be 0, 1 or 2");
    total += o;
  }
  if (total != meta_.n_electrons)
    throw std::invalid_argument("IntegralSet: reference occupations do not sum to the electron count");
}

double IntegralSet::symmetry_defect() const {
  const int n = norb();
  double d = (one_body_ - one_body_.transpose()).cwiseAbs().maxCoeff();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          const double v = two_body(i, j, k, l);
          for (double w : {two_body(j, i, k, l), two_body(i, j, l, k), two_body(k, l, i, j)})
            d = std::max(d, std::abs(v - w));
        }
  return d;
}

// Permutations ---------------------------------------------------------------

Permutation Permutation::identity(int n) {
  Permutation p;
  p.image.resize(n);
  std::iota(p.image.begin(), p.image.end(), 0);
  return p;
}

bool Permutation::is_valid() const {
  std::vector<char> seen(image.size(), 0);
  for (int v : image) {
    if (v < 0 || v >= size() || seen[v]) return false;
    seen[v] = 1;
  }
  return true;
}

Permutation Permutation::inverse() const {
  Permutation inv;
  inv.image.resize(image.size());
  for (int a = 0; a < size(); ++a) inv.image[image[a]] = a;
  return inv;
}

Permutation Permutation::reversed() const {
  Permutation r{image};
  std::reverse(r.image.begin(), r.image.end());
  return r;
}

Permutation compose(const Permutation& p, const Permutation& q) {
  if (p.size() != q.size()) throw std::invalid_argument("compose: size mismatch");
  Permutation r;
  r.image.resize(p.image.size());
  for (int a = 0; a < p.size(); ++a) r.image[a] = q.image[p.image[a]];
  return r;
}

IntegralSet apply_permutation(const IntegralSet& h, const Permutation& p) {
  const int n = h.norb();
  if (p.size() != n) throw std::invalid_argument("apply_permutation: size mismatch");
  if (!p.is_valid()) throw std::invalid_argument("apply_permutation: not a bijection");
  const auto& src = h.meta();
  OrbitalMeta meta = src;
  Eigen::MatrixXd t(n, n);
  for (int a = 0; a < n; ++a) {
    meta.irrep[a] = src.irrep[p.image[a]];
    meta.hf_occupation[a] = src.hf_occupation[p.image[a]];
    meta.energy_order[a] = src.energy_order[p.image[a]];
    for (int b = 0; b < n; ++b) t(a, b) = h.one_body(p.image[a], p.image[b]);
  }
  std::vector<double> v(h.two_body_table().size());
  std::size_t idx = 0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d)
          v[idx++] = h.two_body(p.image[a], p.image[b], p.image[c], p.image[d]);
  return IntegralSet(std::move(meta), std::move(t), std::move(v), h.core_energy());
}

// Model Hamiltonians -----------------------------------------------------------

namespace {

std::vector<double> zero_two_body(int n) {
  return std::vector<double>(static_cast<std::size_t>(n) * n * n * n, 0.0);
}

std::size_t flat(int n, int i, int j, int k, int l) {
  return ((static_cast<std::size_t>(i) * n + j) * n + k) * n + l;
}

void set_chemist(std::vector<double>& v, int n, int i, int j, int k, int l, double x) {
  for (auto [a, b, c, d] : {std::array{i, j, k, l}, std::array{j, i, k, l}, std::array{i, j, l, k},
                            std::array{j, i, l, k}, std::array{k, l, i, j}, std::array{l, k, i, j},
                            std::array{k, l, j, i}, std::array{l, k, j, i}})
    v[flat(n, a, b, c, d)] = x;
}

}  // namespace

IntegralSet build_hubbard(int sites, double t, double u, int n_electrons) {
  if (sites < 1) throw std::invalid_argument("build_hubbard: need at least one site");
  OrbitalMeta meta;
  meta.n_orbitals = sites;
  meta.n_electrons = n_electrons < 0 ? sites : n_electrons;
  meta.two_sz = meta.n_electrons % 2;
  Eigen::MatrixXd one = Eigen::MatrixXd::Zero(sites, sites);
  for (int i = 0; i + 1 < sites; ++i) one(i, i + 1) = one(i + 1, i) = -t;
  auto two = zero_two_body(sites);
  // (ii|ii) = U gives U n_up n_down per site.
  for (int i = 0; i < sites; ++i) two[flat(sites, i, i, i, i)] = u;
  return IntegralSet(std::move(meta), std::move(one), std::move(two), 0.0);
}

IntegralSet build_random(int n, int n_electrons, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("build_random: need at least one orbital");
  Rng rng(seed);
  OrbitalMeta meta;
  meta.n_orbitals = n;
  meta.n_electrons = n_electrons;
  meta.two_sz = n_electrons % 2;
  Eigen::MatrixXd one = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    one(i, i) = -2.0 + 0.5 * i + uniform(rng, -0.05, 0.05);
    for (int j = 0; j < i; ++j) one(i, j) = one(j, i) = uniform(rng, -0.1, 0.1);
  }
  // (ij|kl) = sum_P B^P_ij B^P_kl with symmetric B^P.
  std::vector<Eigen::MatrixXd> factors;
  for (int p = 0; p < n; ++p) {
    Eigen::MatrixXd b(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j <= i; ++j) b(i, j) = b(j, i) = uniform(rng, -0.15, 0.15);
    b(p, p) += 0.7;
    factors.push_back(std::move(b));
  }
  auto two = zero_two_body(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          double s = 0.0;
          for (const auto& b : factors) s += b(i, j) * b(k, l);
          two[flat(n, i, j, k, l)] = s;
        }
  return IntegralSet(std::move(meta), std::move(one), std::move(two), 0.0);
}

IntegralSet build_dimer_chain(int n_units, double t_intra, double u, double coupling) {
  if (n_units < 1) throw std::invalid_argument("build_dimer_chain: need at least one unit");
  const int n = 2 * n_units;
  OrbitalMeta meta;
  meta.n_orbitals = n;
  meta.n_electrons = n;
  meta.two_sz = 0;
  meta.irrep.resize(n);
  Eigen::MatrixXd one = Eigen::MatrixXd::Zero(n, n);
  auto two = zero_two_body(n);
  for (int k = 0; k < n_units; ++k) {
    const int lo = k, hi = k + n_units;
    meta.irrep[lo] = meta.irrep[hi] = k + 1;
    one(lo, lo) = -1.0 - 0.05 * k;
    one(hi, hi) = -0.5 + 0.05 * k;
    one(lo, hi) = one(hi, lo) = -t_intra;
    two[flat(n, lo, lo, lo, lo)] = u;
    two[flat(n, hi, hi, hi, hi)] = u;
    if (k + 1 < n_units) {
      one(lo, lo + 1) = one(lo + 1, lo) = -coupling;
      one(hi, hi + 1) = one(hi + 1, hi) = -coupling;
      set_chemist(two, n, lo, lo, lo + 1, lo + 1, coupling);
    }
  }
  return IntegralSet(std::move(meta), std::move(one), std::move(two), 0.0);
}

// Serialization helpers ----------------------------------------------------------

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

nlohmann::json to_json(const IntegralSet& h) {
  using nlohmann::json;
  const int n = h.norb();
  const auto& m = h.meta();
  json j;
  j["norb"] = n;
  j["nelec"] = m.n_electrons;
  j["ms2"] = m.two_sz;
  j["orbsym"] = m.irrep;
  j["core"] = h.core_energy();
  j["hf_occupations"] = m.hf_occupation;
  j["energy_order"] = m.energy_order;
  json one = json::array();
  for (int i = 0; i < n; ++i)
    for (int jj = 0; jj <= i; ++jj)
      if (h.one_body(i, jj) != 0.0) one.push_back({i + 1, jj + 1, h.one_body(i, jj)});
  j["one_body"] = one;
  json two = json::array();
  for (int i = 0; i < n; ++i)
    for (int jj = 0; jj <= i; ++jj)
      for (int k = 0; k <= i; ++k)
        for (int l = 0; l <= k; ++l) {
          if (i * (i + 1) / 2 + jj < k * (k + 1) / 2 + l) continue;
          const double v = h.two_body(i, jj, k, l);
          if (v != 0.0) two.push_back({i + 1, jj + 1, k + 1, l + 1, v});
        }
  j["two_body"] = two;
  return j;
}

IntegralSet integrals_from_json(const nlohmann::json& j) {
  OrbitalMeta meta;
  const int n = j.at("norb").get<int>();
  meta.n_orbitals = n;
  meta.n_electrons = j.at("nelec").get<int>();
  meta.two_sz = j.value("ms2", 0);
  if (j.contains("orbsym")) meta.irrep = j["orbsym"].get<std::vector<int>>();
  if (j.contains("energy_order")) meta.energy_order = j["energy_order"].get<std::vector<int>>();
  if (j.contains("hf_occupations")) meta.hf_occupation = j["hf_occupations"].get<std::vector<int>>();
  Eigen::MatrixXd one = Eigen::MatrixXd::Zero(n, n);
  auto two = zero_two_body(n);
  auto check = [n](int idx) {
    if (idx < 1 || idx > n) throw ParseError("orbital index out of range in JSON integrals", 0);
  };
  for (const auto& e : j.at("one_body")) {
    const int a = e.at(0).get<int>(), b = e.at(1).get<int>();
    check(a);
    check(b);
    one(a - 1, b - 1) = one(b - 1, a - 1) = e.at(2).get<double>();
  }
  for (const auto& e : j.at("two_body")) {
    int idx[4];
    for (int q = 0; q < 4; ++q) {
      idx[q] = e.at(q).get<int>();
      check(idx[q]);
    }
    set_chemist(two, n, idx[0] - 1, idx[1] - 1, idx[2] - 1, idx[3] - 1, e.at(4).get<double>());
  }
  return IntegralSet(std::move(meta), std::move(one), std::move(two), j.value("core", 0.0));
}

IntegralSet load_integrals(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open integral file '" + path + "'");
  const bool is_json = path.size() > 5 && path.substr(path.size() - 5) == ".json";
  try {
    if (is_json) return integrals_from_json(nlohmann::json::parse(in));
    return parse_fcidump(in);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what(), 0);
  }
}

}  // namespace qidmrg
