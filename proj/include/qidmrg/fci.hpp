#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <vector>

#include "qidmrg/davidson.hpp"
#include "qidmrg/integrals.hpp"

/// Full configuration interaction in a fixed (N, Sz) sector.
///
/// Bit layout and fermionic ordering: spin-orbital mode 2*i is orbital i with
/// spin up, mode 2*i+1 orbital i with spin down (orbital-major, up before down
/// inside an orbital). A determinant with occupied modes m1 < m2 < ... is
/// c+_m1 c+_m2 ... |0>. Every sign in this module follows from that ordering.
namespace qidmrg::fci {

constexpr std::size_t kMaxDeterminants = 4'000'000;

using Det = std::uint64_t;

constexpr int mode(int orbital, int spin) { return 2 * orbital + spin; }  // spin 0 = up, 1 = down

/// Local orbital state index in the (0, down, up, updown) basis.
inline int local_state(Det d, int orbital) {
  return ((d >> mode(orbital, 0)) & 1ULL ? 2 : 0) + ((d >> mode(orbital, 1)) & 1ULL ? 1 : 0);
}

class SectorBasis {
 public:
  SectorBasis(int n_orbitals, int n_electrons, int two_sz);

  int n_orbitals() const { return n_orbitals_; }
  int n_electrons() const { return n_electrons_; }
  int two_sz() const { return two_sz_; }
  std::size_t size() const { return dets_.size(); }
  const std::vector<Det>& determinants() const { return dets_; }
  Det operator[](std::size_t i) const { return dets_[i]; }
  /// Position of `d`, or -1 when it is not in the sector.
  std::ptrdiff_t find(Det d) const;

 private:
  int n_orbitals_, n_electrons_, two_sz_;
  std::vector<Det> dets_;
};

using SectorPtr = std::shared_ptr<const SectorBasis>;

/// Throws std::invalid_argument for infeasible sectors and std::length_error
/// above kMaxDeterminants.
SectorPtr enumerate_sector(int n_orbitals, int n_electrons, int two_sz);

struct WaveVector {
  SectorPtr basis;
  Eigen::VectorXd amplitudes;
};

struct Eigenpair {
  double energy = 0.0;
  WaveVector state;
  double residual = 0.0;
};

/// Matrix-free y = H x, including the core energy.
void apply_hamiltonian(const IntegralSet& h, const SectorBasis& basis, const Eigen::VectorXd& x,
                       Eigen::VectorXd& y);
Eigen::VectorXd hamiltonian_diagonal(const IntegralSet& h, const SectorBasis& basis);
/// Dense matrix, for cross-checks on tiny sectors.
Eigen::MatrixXd hamiltonian_matrix(const IntegralSet& h, const SectorBasis& basis);

/// The k lowest eigenpairs. Davidson starts from the reference determinant
/// (then the lowest diagonal entries); throws ConvergenceError on failure.
std::vector<Eigenpair> ground_state(const IntegralSet& h, const SectorPtr& sector, int k = 1,
                                    const DavidsonOptions& opts = {});

/// Reference determinant from OrbitalMeta::hf_occupation; singly occupied
/// orbitals carry the majority spin.
Det reference_determinant(const OrbitalMeta& meta);
double determinant_energy(const IntegralSet& h, Det d);

/// Reduced density matrix of one or two orbitals.
///
/// Local basis per orbital: 0 = |0>, 1 = |dn>, 2 = |up>, 3 = |updn> = c+_up c+_dn|0>.
/// Two-orbital index = 4 * state(i) + state(j) with i < j. The modes of the
/// subset are moved to the front of the global ordering (keeping their own
/// relative order) before the remaining modes are traced out.
struct SubsetRDM {
  std::vector<int> orbitals;  // sorted
  Eigen::MatrixXd matrix;
};

SubsetRDM subset_rdm(const WaveVector& psi, std::vector<int> orbitals);

/// <S^2> with S^2 = S-S+ + Sz^2 + Sz.
double expectation_s2(const WaveVector& psi);

/// Eigenvalues (descending) of the reduced density matrix of orbitals
/// [0, cut) of a sector state.
std::vector<double> block_spectrum(const WaveVector& psi, int cut);

}  // namespace qidmrg::fci
