#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include "qidmrg/fci.hpp"
#include "qidmrg/integrals.hpp"
#include "qidmrg/sectors.hpp"

/// Environment bases for the CI-DEAS warm-up. Orbital indices are 0-based and
/// refer to whatever indexing the caller uses consistently (chain positions
/// inside the DMRG driver).
namespace qidmrg::cideas {

/// Orbitals by non-increasing single-orbital entropy.
struct CasVector {
  std::vector<int> orbitals;
};

/// Stable sort by decreasing entropy (ties keep index order). Throws
/// std::invalid_argument on a negative entropy.
CasVector build_cas_vector(const std::vector<double>& s1);
/// [N-1, ..., 0], used before any entropy is known.
CasVector bootstrap_cas_vector(int n);

enum class EnvClass { DoublyFilled, Empty, Active };

struct EnvClassification {
  std::vector<int> orbitals;  // ascending
  std::vector<EnvClass> kind;

  std::vector<int> of_kind(EnvClass k) const;
};

/// The first `budget` environment orbitals met along the CAS vector are
/// active; the others are doubly filled when hf_occ = 2 and empty otherwise.
EnvClassification classify_environment(const std::vector<int>& hf_occ, const CasVector& casv,
                                       const std::vector<int>& env, int budget);

struct WarmupConfig {
  int ci_level_cap = 3;
  int m_start = 64;
  int active_budget = 7;

  void validate() const;
};

class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EnvState {
  fci::Det det;  // occupied modes, 2 * orbital + spin
  Qn qn;
  int rank = 0;  // excitation level relative to the reference determinant
  double score = 0.0;
};

/// Determinants over the environment orbitals, at most max(m_l, m_start):
/// active orbitals vary freely up to `ci_level_cap` excitations, doubly
/// filled orbitals stay filled, empty orbitals stay empty. Ordered by rank,
/// then by the summed entropy of the orbitals that receive electrons (the CAS
/// rank stands in when s1 is empty), then by bit pattern. `feasible` filters
/// by quantum number. Throws InfeasibleError when nothing survives.
std::vector<EnvState> build_environment_basis(const IntegralSet& h, const EnvClassification& cls,
                                              const WarmupConfig& cfg, int m_l, const std::vector<double>& s1,
                                              const CasVector& casv,
                                              const std::function<bool(Qn)>& feasible = {});

/// Energy of the given orbitals doubly occupied with all others empty,
/// without the core energy.
double doubly_filled_energy_shift(const IntegralSet& h, const std::vector<int>& orbitals);

}  // namespace qidmrg::cideas
