#pragma once

#include <Eigen/Dense>
#include <vector>

#include "qidmrg/integrals.hpp"
#include "qidmrg/sectors.hpp"

/// Operator strings and their matrix product operator form.
///
/// A ladder operator acts on mode 2*site + spin (spin 0 = up), the same
/// ordering as the full-CI oracle. In the product basis of the chain, an
/// operator on site t carries the parity string of every site before t, so a
/// canonical (site-sorted) string factorizes into local 4x4 matrices
/// ops_t * P^(number of operators right of t).
namespace qidmrg {

struct LadderOp {
  int mode;
  bool dagger;
  int site() const { return mode / 2; }
  int spin() const { return mode % 2; }
  auto operator<=>(const LadderOp&) const = default;
};

struct OpTerm {
  double coef;
  std::vector<LadderOp> ops;  // product, leftmost applied last
};

/// Local 4x4 matrices in the (0, down, up, updown) basis.
Eigen::Matrix4d local_ladder(int spin, bool dagger);
Eigen::Matrix4d local_parity();

/// T, V and the core energy as operator strings (the core is an empty string).
std::vector<OpTerm> hamiltonian_terms(const IntegralSet& h);
/// S^2 = sum_ij S-_i S+_j + Sz_i Sz_j + sum_i Sz_i.
std::vector<OpTerm> s2_terms(int n_orbitals);

struct MpoEntry {
  int from;
  int to;
  Eigen::Matrix4d op;
};

struct Mpo {
  int n_sites = 0;
  /// Per cut 0..n_sites: quantum-number shift of the left part of each channel.
  std::vector<std::vector<Qn>> shift;
  /// Per site t: entries between channels of cut t and cut t+1.
  std::vector<std::vector<MpoEntry>> site;

  int channels(int cut) const { return static_cast<int>(shift[cut].size()); }
  int max_bond() const;
};

/// Builds an MPO by following every string through the cuts. At cut b a string
/// is tracked by its left part while that part has fewer operators than the
/// rest (ties go left up to the middle of the chain), and by its right part
/// afterwards; the coefficient enters where the label switches sides.
Mpo build_mpo(int n_sites, const std::vector<OpTerm>& terms);

// Environment algebra ----------------------------------------------------------

/// Operators of a left environment at cut t combined with site t, expressed in
/// `el` (built from `bond`, the bond space at cut t).
Environment enlarge_left(const Environment& env, const EnlargedSpace& el, const Mpo& mpo, int t);
/// Site t combined with the right environment at cut t+1, expressed in `er`.
Environment enlarge_right(const Environment& env, const EnlargedSpace& er, const Mpo& mpo, int t);
/// U^T O U per channel; u is indexed by the sectors of `bond`.
Environment project_left(const Environment& ops, const EnlargedSpace& el, const BondSpace& bond,
                         const std::vector<Eigen::MatrixXd>& u);
/// V^T O V (with vt = V^T) per channel; vt is indexed by the sectors of `bond`.
Environment project_right(const Environment& ops, const EnlargedSpace& er, const BondSpace& bond,
                          const std::vector<Eigen::MatrixXd>& vt);

/// Environment at cut 0 (one channel, scalar 1).
Environment left_edge(const Mpo& mpo, const BondSpace& bond);
/// Environment at the last cut.
Environment right_edge(const Mpo& mpo, const BondSpace& bond);

}  // namespace qidmrg
