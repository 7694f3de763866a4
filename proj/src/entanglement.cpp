#include "qidmrg/entanglement.hpp"

#include <cmath>
#include <map>
#include <string>

#include "qidmrg/sectors.hpp"

namespace qidmrg {

OrbitalRdms oracle_rdms(const fci::WaveVector& psi) {
  OrbitalRdms r;
  r.n = psi.basis->n_orbitals();
  for (int i = 0; i < r.n; ++i) r.one.push_back(fci::subset_rdm(psi, {i}).matrix);
  for (int i = 0; i < r.n; ++i)
    for (int j = i + 1; j < r.n; ++j) r.two.push_back(fci::subset_rdm(psi, {i, j}).matrix);
  return r;
}

double entropy_of_rdm(const Eigen::MatrixXd& rho) {
  if (rho.rows() != rho.cols() || rho.rows() == 0) throw std::invalid_argument("entropy_of_rdm: not square");
  if (std::abs(rho.trace() - 1.0) > 1e-8)
    throw std::invalid_argument("entropy_of_rdm: trace " + std::to_string(rho.trace()) + " is not 1");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (rho + rho.transpose()), Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double w = es.eigenvalues()[i];
    if (w > 0.0) s -= w * std::log(w);
  }
  return s;
}

MutualInfoMatrix mutual_information(const std::vector<double>& s1, const Eigen::MatrixXd& s2) {
  const int n = static_cast<int>(s1.size());
  if (s2.rows() != n || s2.cols() != n) throw std::invalid_argument("mutual_information: size mismatch");
  MutualInfoMatrix m;
  m.n = n;
  m.s1 = s1;
  m.s2 = s2;
  m.values = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double v = s1[i] + s1[j] - s2(i, j);
      if (v < -1e-10)
        throw SubadditivityError("mutual_information: s2(" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                                 ") exceeds s1_i + s1_j by " + std::to_string(-v));
      if (v < 0.0) v = 0.0;
      m.values(i, j) = m.values(j, i) = v;
    }
  return m;
}

MutualInfoMatrix mutual_information(const OrbitalRdms& rdms) {
  const int n = rdms.n;
  std::vector<double> s1(n);
  for (int i = 0; i < n; ++i) s1[i] = entropy_of_rdm(rdms.one[i]);
  Eigen::MatrixXd s2 = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) s2(i, j) = s2(j, i) = entropy_of_rdm(rdms.pair(i, j));
  return mutual_information(s1, s2);
}

double total_correlation(const std::vector<double>& s1) {
  double t = 0.0;
  for (double v : s1) {
    if (v < 0.0) throw std::invalid_argument("total_correlation: negative entropy");
    t += v;
  }
  return t;
}

std::vector<int> bond_count(const MutualInfoMatrix& info, double threshold) {
  if (threshold < 0.0) throw std::invalid_argument("bond_count: negative threshold");
  std::vector<int> deg(info.n, 0);
  for (int i = 0; i < info.n; ++i)
    for (int j = 0; j < info.n; ++j)
      if (j != i && info.values(i, j) > threshold) ++deg[i];
  return deg;
}

int two_orbital_free_entries(bool subtract_trace) {
  std::map<Qn, int> block;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) ++block[kSiteQn[a] + kSiteQn[b]];
  int count = 0;
  for (const auto& [q, d] : block) count += d * (d + 1) / 2;
  return subtract_trace ? count - 1 : count;
}

}  // namespace qidmrg
