#pragma once

#include <optional>
#include <vector>

#include "qidmrg/cideas.hpp"
#include "qidmrg/integrals.hpp"
#include "qidmrg/mpo.hpp"
#include "qidmrg/sectors.hpp"

namespace qidmrg {

struct SweepConfig {
  double chi = 1e-6;
  int m_min = 64;
  int m_start = 64;
  int m_cap = 4096;
  int max_sweeps = 8;
  double convergence_tol = 1e-8;
  double solver_tol = 1e-9;
  std::optional<int> n_electrons;  // default: from the orbital metadata
  std::optional<int> two_sz;

  void validate() const;
};

/// Density-matrix eigenvalues at a cut, non-increasing.
struct SchmidtSpectrum {
  int cut = 0;
  std::vector<double> weights;
};

double von_neumann(const std::vector<double>& weights);

struct TruncationRecord {
  int half_sweep = 0;
  int cut = 0;
  int kept = 0;
  int available = 0;
  double entropy_before = 0.0;
  double entropy_after = 0.0;
  double info_loss = 0.0;
  double discarded_weight = 0.0;
  int m_used = 0;        // resulting bond dimension
  bool clamped = false;  // limited by m_cap
};

/// Dynamic block-state selection on one spectrum.
TruncationRecord dbss_truncate(const SchmidtSpectrum& spectrum, const SweepConfig& cfg);

/// Superblock wave function at sites (pos, pos+1), block-diagonal in the
/// label of the middle cut.
struct Theta {
  int pos = 0;
  EnlargedSpace el, er;
  std::vector<Qn> qn;
  std::vector<int> l_sector, r_sector;
  std::vector<Eigen::MatrixXd> block;
};

SchmidtSpectrum schmidt_spectrum(const Theta& theta);

/// Left-canonical chain whose last tensor carries the norm.
struct Mps {
  Qn target;
  std::vector<SiteTensor> sites;
  int n_sites() const { return static_cast<int>(sites.size()); }
};

struct StepRecord {
  int half_sweep = 0;
  int position = 0;
  bool left_to_right = true;
  double energy = 0.0;
  double residual = 0.0;
  int iterations = 0;
  int superblock_dim = 0;
  int bond_dim = 0;  // dimension of the middle bond after the step
};

/// Block-growth bookkeeping of one left-to-right step at position l:
/// s_L(l) + s(1)_l + I_L(l) = s_L(l+1), all before truncation.
struct GrowthRecord {
  int half_sweep = 0;
  int cut = 0;                   // l, orbitals in the left block before growth
  double s_block = 0.0;          // s_L(l) from the superblock state
  double s_block_previous = -1;  // s_L(l) recorded by the previous step, -1 if none
  double s_site = 0.0;           // s(1) of the added orbital
  double s_grown = 0.0;          // s_L(l+1), Schmidt spectrum
  double growth = 0.0;           // I_L(l) <= 0
  double s_left = 0.0;           // entropy of rho_L(l+1) from its own eigenvalues
  double s_right = 0.0;          // entropy of rho_R(l+1) from its own eigenvalues
};

struct DmrgResult {
  std::vector<double> half_sweep_energy;  // index 0 = warm-up
  double energy = 0.0;
  std::vector<std::vector<double>> block_entropy;  // per sweep (0 = warm-up), cuts 0..N
  std::vector<std::vector<double>> site_entropy;   // per sweep, collected from the superblock
  std::vector<SchmidtSpectrum> final_spectra;      // cuts 1..N-1 of the last sweep
  std::vector<TruncationRecord> truncations;
  std::vector<StepRecord> steps;
  std::vector<GrowthRecord> growth;
  int m_max = 0;
  int sweeps = 0;  // full sweeps after the warm-up
  bool converged = false;
  double s2 = 0.0;
  Permutation ordering;
  Mps state;  // in chain order
};

enum class WarmupKind { CiDeas, Naive };

/// CI-DEAS inputs; casv and s1 refer to original orbital indices and may be
/// empty (bootstrap vector, rank proxy).
struct Warmup {
  WarmupKind kind = WarmupKind::CiDeas;
  cideas::WarmupConfig config;
  std::vector<int> casv;
  std::vector<double> s1;
};

/// Two-site DMRG on the chain h reordered by `ordering`. The warm-up is a
/// left-to-right half-sweep with environments from `warmup`; each later sweep
/// is right-to-left followed by left-to-right. The warm-up's m_start is taken
/// from cfg. Throws ConvergenceError when a superblock solve fails.
DmrgResult run_dmrg(const IntegralSet& h, const Permutation& ordering, const SweepConfig& cfg,
                    const Warmup& warmup = {});

/// <psi|O|psi> for an MPO on the same chain.
double expectation(const Mps& psi, const Mpo& mpo);

}  // namespace qidmrg
