#include "qidmrg/fci.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <stdexcept>

namespace qidmrg::fci {

namespace {

bool annihilate(Det& d, int m, int& sign) {
  const Det bit = Det{1} << m;
  if (!(d & bit)) return false;
  if (std::popcount(d & (bit - 1)) & 1) sign = -sign;
  d &= ~bit;
  return true;
}

bool create(Det& d, int m, int& sign) {
  const Det bit = Det{1} << m;
  if (d & bit) return false;
  if (std::popcount(d & (bit - 1)) & 1) sign = -sign;
  d |= bit;
  return true;
}

struct OneBody {
  int i, j;
  double v;
};
struct TwoBody {
  int i, j, k, l;
  double v;
};

struct Terms {
  std::vector<OneBody> one;
  std::vector<TwoBody> two;
};

Terms collect_terms(const IntegralSet& h) {
  Terms t;
  const int n = h.norb();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (h.one_body(i, j) != 0.0) t.one.push_back({i, j, h.one_body(i, j)});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          const double v = coulomb_coefficient(h, i, j, k, l);
          if (v != 0.0) t.two.push_back({i, j, k, l, v});
        }
  return t;
}

// Calls emit(target, coefficient) for every image of `d` under H - core.
template <class Emit>
void for_each_image(const Terms& terms, Det d, Emit&& emit) {
  for (const auto& t : terms.one)
    for (int s = 0; s < 2; ++s) {
      Det e = d;
      int sign = 1;
      if (!annihilate(e, mode(t.j, s), sign)) continue;
      if (!create(e, mode(t.i, s), sign)) continue;
      emit(e, sign * t.v);
    }
  for (const auto& t : terms.two)
    for (int s = 0; s < 2; ++s)
      for (int sp = 0; sp < 2; ++sp) {
        Det e = d;
        int sign = 1;
        if (!annihilate(e, mode(t.l, s), sign)) continue;
        if (!annihilate(e, mode(t.k, sp), sign)) continue;
        if (!create(e, mode(t.j, sp), sign)) continue;
        if (!create(e, mode(t.i, s), sign)) continue;
        emit(e, sign * t.v);
      }
}

}  // namespace

SectorBasis::SectorBasis(int n_orbitals, int n_electrons, int two_sz)
    : n_orbitals_(n_orbitals), n_electrons_(n_electrons), two_sz_(two_sz) {
  if (n_orbitals < 1 || n_orbitals > 32) throw std::invalid_argument("SectorBasis: orbital count must be in [1, 32]");
  if (n_electrons < 0 || n_electrons > 2 * n_orbitals || std::abs(two_sz) > n_electrons ||
      (n_electrons + two_sz) % 2 != 0)
    throw std::invalid_argument("SectorBasis: infeasible sector (N=" + std::to_string(n_electrons) +
                                ", 2Sz=" + std::to_string(two_sz) + ")");
  const int n_up = (n_electrons + two_sz) / 2, n_dn = (n_electrons - two_sz) / 2;
  if (n_up > n_orbitals || n_dn > n_orbitals)
    throw std::invalid_argument("SectorBasis: infeasible sector, too many electrons of one spin");

  auto binom = [](int n, int k) {
    double r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
  };
  if (binom(n_orbitals, n_up) * binom(n_orbitals, n_dn) > static_cast<double>(kMaxDeterminants))
    throw std::length_error("SectorBasis: sector exceeds the determinant cap");

  // Spatial occupation patterns with a given popcount, spread onto one spin.
  auto patterns = [n_orbitals](int count) {
    std::vector<std::uint32_t> out;
    for (std::uint64_t p = 0; p < (std::uint64_t{1} << n_orbitals); ++p)
      if (std::popcount(p) == count) out.push_back(static_cast<std::uint32_t>(p));
    return out;
  };
  auto spread = [n_orbitals](std::uint32_t p, int spin) {
    Det d = 0;
    for (int i = 0; i < n_orbitals; ++i)
      if (p >> i & 1U) d |= Det{1} << mode(i, spin);
    return d;
  };
  const auto ups = patterns(n_up), dns = patterns(n_dn);
  dets_.reserve(ups.size() * dns.size());
  for (auto u : ups)
    for (auto dn : dns) dets_.push_back(spread(u, 0) | spread(dn, 1));
  std::sort(dets_.begin(), dets_.end());
}

std::ptrdiff_t SectorBasis::find(Det d) const {
  auto it = std::lower_bound(dets_.begin(), dets_.end(), d);
  if (it == dets_.end() || *it != d) return -1;
  return it - dets_.begin();
}

SectorPtr enumerate_sector(int n_orbitals, int n_electrons, int two_sz) {
  return std::make_shared<const SectorBasis>(n_orbitals, n_electrons, two_sz);
}

void apply_hamiltonian(const IntegralSet& h, const SectorBasis& basis, const Eigen::VectorXd& x,
                       Eigen::VectorXd& y) {
  if (h.norb() != basis.n_orbitals()) throw std::invalid_argument("apply_hamiltonian: orbital count mismatch");
  const Terms terms = collect_terms(h);
  y = h.core_energy() * x;
  const auto& dets = basis.determinants();
  for (std::size_t a = 0; a < dets.size(); ++a) {
    const double xa = x[static_cast<Eigen::Index>(a)];
    if (xa == 0.0) continue;
    for_each_image(terms, dets[a], [&](Det e, double c) {
      const auto b = basis.find(e);
      if (b < 0) throw std::logic_error("apply_hamiltonian: left the (N, Sz) sector");
      y[b] += c * xa;
    });
  }
}

Eigen::VectorXd hamiltonian_diagonal(const IntegralSet& h, const SectorBasis& basis) {
  const Terms terms = collect_terms(h);
  Eigen::VectorXd diag(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t a = 0; a < basis.size(); ++a) {
    double s = h.core_energy();
    for_each_image(terms, basis[a], [&](Det e, double c) {
      if (e == basis[a]) s += c;
    });
    diag[static_cast<Eigen::Index>(a)] = s;
  }
  return diag;
}

Eigen::MatrixXd hamiltonian_matrix(const IntegralSet& h, const SectorBasis& basis) {
  const auto n = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXd m(n, n);
  Eigen::VectorXd e(n), col(n);
  for (Eigen::Index a = 0; a < n; ++a) {
    e.setZero();
    e[a] = 1.0;
    apply_hamiltonian(h, basis, e, col);
    m.col(a) = col;
  }
  return m;
}

Det reference_determinant(const OrbitalMeta& meta) {
  Det d = 0;
  const int single_spin = meta.two_sz >= 0 ? 0 : 1;
  for (int i = 0; i < meta.n_orbitals; ++i) {
    if (meta.hf_occupation[i] == 2) d |= (Det{1} << mode(i, 0)) | (Det{1} << mode(i, 1));
    if (meta.hf_occupation[i] == 1) d |= Det{1} << mode(i, single_spin);
  }
  return d;
}

double determinant_energy(const IntegralSet& h, Det d) {
  const Terms terms = collect_terms(h);
  double s = h.core_energy();
  for_each_image(terms, d, [&](Det e, double c) {
    if (e == d) s += c;
  });
  return s;
}

std::vector<Eigenpair> ground_state(const IntegralSet& h, const SectorPtr& sector, int k,
                                    const DavidsonOptions& opts) {
  if (!sector || sector->size() == 0) throw std::invalid_argument("ground_state: empty sector");
  const auto n = static_cast<Eigen::Index>(sector->size());
  DavidsonOptions o = opts;
  o.n_roots = k;
  const Eigen::VectorXd diag = hamiltonian_diagonal(h, *sector);
  Eigen::MatrixXd guess(n, 0);
  if (sector->n_electrons() == h.meta().n_electrons && sector->two_sz() == h.meta().two_sz) {
    const auto ref = sector->find(reference_determinant(h.meta()));
    if (ref >= 0) guess = Eigen::VectorXd::Unit(n, ref);
  }
  auto apply = [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) { apply_hamiltonian(h, *sector, x, y); };
  const DavidsonResult r = davidson(apply, diag, guess, o);
  std::vector<Eigenpair> out;
  for (int i = 0; i < k; ++i) {
    Eigenpair p;
    p.energy = r.values[i];
    p.residual = r.residuals[i];
    p.state.basis = sector;
    p.state.amplitudes = r.vectors.col(i).normalized();
    out.push_back(std::move(p));
  }
  return out;
}

SubsetRDM subset_rdm(const WaveVector& psi, std::vector<int> orbitals) {
  const auto& basis = *psi.basis;
  std::sort(orbitals.begin(), orbitals.end());
  if (orbitals.empty() || orbitals.size() > 2) throw std::invalid_argument("subset_rdm: need one or two orbitals");
  if (orbitals.size() == 2 && orbitals[0] == orbitals[1]) throw std::invalid_argument("subset_rdm: repeated orbital");
  for (int o : orbitals)
    if (o < 0 || o >= basis.n_orbitals()) throw std::out_of_range("subset_rdm: orbital index out of range");

  Det subset_mask = 0;
  for (int o : orbitals) subset_mask |= (Det{3} << mode(o, 0));
  const int dim = orbitals.size() == 1 ? 4 : 16;

  // rest configuration -> list of (local index, signed amplitude)
  std::map<Det, std::vector<std::pair<int, double>>> groups;
  for (std::size_t a = 0; a < basis.size(); ++a) {
    const double amp = psi.amplitudes[static_cast<Eigen::Index>(a)];
    if (amp == 0.0) continue;
    const Det d = basis[a];
    const Det rest = d & ~subset_mask;
    int sign_exp = 0, local = 0, moved = 0;
    for (int o : orbitals) {
      const Det below = (Det{1} << mode(o, 0)) - 1;
      const int occ = std::popcount(d & (Det{3} << mode(o, 0)));
      // Rest electrons in front of this orbital's modes.
      const int in_front = std::popcount(d & below) - moved;
      sign_exp += occ * in_front;
      moved += occ;
      local = local * 4 + local_state(d, o);
    }
    groups[rest].emplace_back(local, (sign_exp & 1) ? -amp : amp);
  }
  SubsetRDM out;
  out.orbitals = orbitals;
  out.matrix = Eigen::MatrixXd::Zero(dim, dim);
  for (const auto& [rest, entries] : groups)
    for (const auto& [x, ax] : entries)
      for (const auto& [y, ay] : entries) out.matrix(x, y) += ax * ay;
  return out;
}

double expectation_s2(const WaveVector& psi) {
  const auto& basis = *psi.basis;
  // |S+ psi|^2 with S+ = sum_i c+_{i,up} c_{i,dn}.
  std::map<Det, double> raised;
  for (std::size_t a = 0; a < basis.size(); ++a) {
    const double amp = psi.amplitudes[static_cast<Eigen::Index>(a)];
    if (amp == 0.0) continue;
    for (int i = 0; i < basis.n_orbitals(); ++i) {
      Det e = basis[a];
      int sign = 1;
      if (!annihilate(e, mode(i, 1), sign)) continue;
      if (!create(e, mode(i, 0), sign)) continue;
      raised[e] += sign * amp;
    }
  }
  double norm2 = 0.0;
  for (const auto& [d, v] : raised) norm2 += v * v;
  const double sz = 0.5 * basis.two_sz();
  return norm2 + sz * sz + sz;
}

std::vector<double> block_spectrum(const WaveVector& psi, int cut) {
  const auto& basis = *psi.basis;
  if (cut < 0 || cut > basis.n_orbitals()) throw std::out_of_range("block_spectrum: bad cut");
  const Det left_mask = cut == 0 ? 0 : ((Det{1} << mode(cut, 0)) - 1);
  std::map<Det, Eigen::Index> rows, cols;
  for (Det d : basis.determinants()) {
    rows.emplace(d & left_mask, 0);
    cols.emplace(d & ~left_mask, 0);
  }
  Eigen::Index r = 0, c = 0;
  for (auto& [k, v] : rows) v = r++;
  for (auto& [k, v] : cols) v = c++;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(r, c);
  for (std::size_t a = 0; a < basis.size(); ++a) {
    const Det d = basis[a];
    m(rows[d & left_mask], cols[d & ~left_mask]) = psi.amplitudes[static_cast<Eigen::Index>(a)];
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  std::vector<double> w;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
    const double s = svd.singularValues()[i];
    w.push_back(s * s);
  }
  std::sort(w.rbegin(), w.rend());
  return w;
}

}  // namespace qidmrg::fci
