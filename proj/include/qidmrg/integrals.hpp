#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace qidmrg {

/// Error raised while reading an integral file. `line` is 1-based, 0 when
/// the problem is not tied to a specific line.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// Per-orbital metadata. Orbital indices are 0-based in memory and 1-based in
/// every text format.
struct OrbitalMeta {
  int n_orbitals = 0;
  int n_electrons = 0;
  int two_sz = 0;
  std::vector<int> irrep;          // abelian irrep label per orbital (ORBSYM)
  std::vector<int> hf_occupation;  // 0, 1 or 2 in the reference determinant
  std::vector<int> energy_order;   // rank in the canonical ordering

  int n_up() const { return (n_electrons + two_sz) / 2; }
  int n_down() const { return (n_electrons - two_sz) / 2; }
};

/// Aufbau occupations following `energy_order`: the lowest n_up ranks carry an
/// up electron, the lowest n_down ranks a down electron.
std::vector<int> aufbau_occupation(const std::vector<int>& energy_order, int n_up, int n_down);

enum class IndexConvention { Chemist };

/// One- and two-electron integrals of a real orbital basis.
///
/// The two-electron table is stored in chemist notation (ij|kl), fully
/// expanded over the 8-fold permutational symmetry. The Hamiltonian reads
///
///   H = core + sum_{ij,s} T_ij c+_is c_js
///            + sum_{ijkl,s,s'} V_ijkl c+_is c+_js' c_ks' c_ls
///
/// with V_ijkl = (il|jk) / 2; see `coulomb_coefficient`.
class IntegralSet {
 public:
  IntegralSet() = default;
  IntegralSet(OrbitalMeta meta, Eigen::MatrixXd one_body, std::vector<double> two_body, double core);

  const OrbitalMeta& meta() const { return meta_; }
  int norb() const { return meta_.n_orbitals; }
  double core_energy() const { return core_; }
  IndexConvention convention() const { return IndexConvention::Chemist; }

  double one_body(int i, int j) const { return one_body_(i, j); }
  const Eigen::MatrixXd& one_body_matrix() const { return one_body_; }
  /// (ij|kl), 0-based.
  double two_body(int i, int j, int k, int l) const { return two_body_[index(i, j, k, l)]; }
  const std::vector<double>& two_body_table() const { return two_body_; }

  /// Largest deviation from T_ij = T_ji and from the 8-fold symmetry of (ij|kl).
  double symmetry_defect() const;

 private:
  std::size_t index(int i, int j, int k, int l) const {
    const std::size_t n = static_cast<std::size_t>(meta_.n_orbitals);
    return ((static_cast<std::size_t>(i) * n + j) * n + k) * n + l;
  }

  OrbitalMeta meta_;
  Eigen::MatrixXd one_body_;
  std::vector<double> two_body_;
  double core_ = 0.0;
};

/// The single place where the stored chemist integrals are mapped onto the
/// coefficient of c+_i c+_j c_k c_l (summed over both spins, no extra 1/2).
inline double coulomb_coefficient(const IntegralSet& h, int i, int j, int k, int l) {
  return 0.5 * h.two_body(i, l, j, k);
}

/// Maps chain position -> original orbital index (0-based).
struct Permutation {
  std::vector<int> image;

  static Permutation identity(int n);
  int size() const { return static_cast<int>(image.size()); }
  bool is_valid() const;
  Permutation inverse() const;
  Permutation reversed() const;
  bool operator==(const Permutation&) const = default;
};

/// Composition matching integral reindexing: apply_permutation(h, compose(p, q))
/// equals apply_permutation(apply_permutation(h, q), p).
Permutation compose(const Permutation& p, const Permutation& q);

/// Reindexes every table so that new orbital a is old orbital p.image[a].
IntegralSet apply_permutation(const IntegralSet& h, const Permutation& p);

/// Open-chain Hubbard model. `n_electrons` < 0 selects half filling.
IntegralSet build_hubbard(int sites, double t, double u, int n_electrons = -1);

/// Seeded molecule-like test Hamiltonian: increasing diagonal one-body levels,
/// small off-diagonal couplings and a positive semidefinite (ij|kl) built from
/// a random low-rank factorization.
IntegralSet build_random(int n_orbitals, int n_electrons, std::uint64_t seed);

/// Weakly coupled two-orbital units. Unit u has orbitals u and u + n_units, so
/// the energetic ordering places partners n_units apart.
IntegralSet build_dimer_chain(int n_units, double t_intra, double u, double coupling);

// FCIDUMP ------------------------------------------------------------------

IntegralSet parse_fcidump(std::istream& in);
IntegralSet parse_fcidump_string(const std::string& text);
IntegralSet read_fcidump(const std::string& path);
void write_fcidump(std::ostream& out, const IntegralSet& h);
std::string fcidump_string(const IntegralSet& h);

// JSON fixtures --------------------------------------------------------------

nlohmann::json to_json(const IntegralSet& h);
IntegralSet integrals_from_json(const nlohmann::json& j);

/// Loads either format, choosing by extension (.json) or content.
IntegralSet load_integrals(const std::string& path);

/// Shortest representation that parses back to the same double.
std::string format_double(double v);

}  // namespace qidmrg
