#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

#include "qidmrg/fci.hpp"

namespace qidmrg {

/// One- and two-orbital reduced density matrices of a state, in the local
/// basis (0, down, up, updown); two-orbital index 4 * x_i + x_j for i < j.
struct OrbitalRdms {
  int n = 0;
  std::vector<Eigen::Matrix4d> one;
  std::vector<Eigen::MatrixXd> two;  // packed upper triangle, see index()

  static int index(int n, int i, int j) { return i * n - i * (i + 1) / 2 + (j - i - 1); }
  const Eigen::MatrixXd& pair(int i, int j) const { return two[index(n, i, j)]; }
  Eigen::MatrixXd& pair(int i, int j) { return two[index(n, i, j)]; }
};

/// All RDMs of an oracle state by direct partial trace.
OrbitalRdms oracle_rdms(const fci::WaveVector& psi);

class SubadditivityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Von Neumann entropy in nats; throws std::invalid_argument when the trace
/// is off by more than 1e-8.
double entropy_of_rdm(const Eigen::MatrixXd& rho);

/// I_ij = s1_i + s1_j - s2_ij (non-negative), zero diagonal.
struct MutualInfoMatrix {
  int n = 0;
  Eigen::MatrixXd values;
  std::vector<double> s1;
  Eigen::MatrixXd s2;
};

/// Deficits down to -1e-10 are set to zero; larger subadditivity violations
/// throw SubadditivityError.
MutualInfoMatrix mutual_information(const std::vector<double>& s1, const Eigen::MatrixXd& s2);
MutualInfoMatrix mutual_information(const OrbitalRdms& rdms);

double total_correlation(const std::vector<double>& s1);

/// Per orbital, the number of partners with I_ij above the threshold.
std::vector<int> bond_count(const MutualInfoMatrix& info, double threshold = 1e-4);

/// Independent real entries of a two-orbital RDM that (n, sz) conservation
/// leaves free: the upper triangles of its symmetry blocks, optionally minus
/// one for the unit trace.
int two_orbital_free_entries(bool subtract_trace);

}  // namespace qidmrg
