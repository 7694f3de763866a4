#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "qidmrg/integrals.hpp"

namespace qidmrg {

struct CostParams {
  double eta = 2.0;

  void validate() const;
};

/// Keeps orbitals with equal labels on contiguous chain positions.
struct IrrepConstraint {
  bool enabled = false;
  std::vector<int> labels;
};

enum class OrderingMethod { Anneal, Fiedler, Brute, Input };

std::string to_string(OrderingMethod m);

struct OrderingResult {
  Permutation permutation;  // image[position] = orbital
  double cost = 0.0;
  OrderingMethod method = OrderingMethod::Input;
  std::uint64_t seed = 0;
  // Fiedler only
  Eigen::VectorXd fiedler;  // entries per orbital, empty when the graph is disconnected
  double lambda2 = 0.0;
  bool disconnected = false;
  bool degenerate = false;
};

/// Sum over unordered pairs {a, b} of I(a, b) |pos(a) - pos(b)|^eta.
double entanglement_distance(const Eigen::MatrixXd& info, const Permutation& p, const CostParams& params = {});

struct AnnealSchedule {
  std::uint64_t seed = 20121;
  long iterations = 0;        // 0: 10^4 per orbital
  double cooling_range = 1e-4;  // final / initial temperature
};

/// Simulated annealing started from `start`. With the constraint enabled,
/// moves swap orbitals inside one irrep block or exchange adjacent blocks; a
/// start that splits a block is first regrouped in order of first appearance.
/// The best ordering visited is returned.
OrderingResult optimize_ordering(const Eigen::MatrixXd& info, const Permutation& start,
                                 const IrrepConstraint& constraint = {}, const CostParams& params = {},
                                 const AnnealSchedule& schedule = {});

/// Orbitals sorted by their Fiedler-vector entries; both directions are tried
/// and the cheaper one kept. A degenerate second eigenvalue gives the
/// identity. A disconnected graph is ordered component by component, larger
/// components first.
OrderingResult fiedler_ordering(const Eigen::MatrixXd& info, const CostParams& params = {});

constexpr int kBruteForceCap = 9;

/// Exhaustive minimum over orderings with p[0] < p[N-1]; lexicographically
/// first among ties. Throws std::invalid_argument above kBruteForceCap.
OrderingResult brute_force_ordering(const Eigen::MatrixXd& info, const CostParams& params = {});

/// True when every label occupies a contiguous run of positions.
bool irreps_contiguous(const std::vector<int>& labels, const Permutation& p);

}  // namespace qidmrg
