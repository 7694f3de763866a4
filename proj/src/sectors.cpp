#include "qidmrg/sectors.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace qidmrg {

bool fits(Qn q, int sites) {
  if (q.n < 0 || q.n > 2 * sites || ((q.n + q.sz2) & 1)) return false;
  const int up = (q.n + q.sz2) / 2, dn = (q.n - q.sz2) / 2;
  return up >= 0 && dn >= 0 && up <= sites && dn <= sites;
}

bool admissible(Qn q, int left_sites, int right_sites, Qn target) {
  return fits(q, left_sites) && fits(target - q, right_sites);
}

int BondSpace::total() const {
  int t = 0;
  for (int d : dim) t += d;
  return t;
}

int BondSpace::offset(int sector) const {
  int t = 0;
  for (int i = 0; i < sector; ++i) t += dim[i];
  return t;
}

int BondSpace::find(Qn q) const {
  const auto it = std::lower_bound(qn.begin(), qn.end(), q);
  return it != qn.end() && *it == q ? static_cast<int>(it - qn.begin()) : -1;
}

int EnlargedSpace::total() const {
  int t = 0;
  for (int d : dim) t += d;
  return t;
}

int EnlargedSpace::find(Qn q) const {
  const auto it = std::lower_bound(qn.begin(), qn.end(), q);
  return it != qn.end() && *it == q ? static_cast<int>(it - qn.begin()) : -1;
}

namespace {

EnlargedSpace enlarge(const BondSpace& bond, int sign, int left_sites, int right_sites, Qn target) {
  std::map<Qn, std::vector<std::pair<int, int>>> groups;
  for (int i = 0; i < bond.size(); ++i)
    for (int s = 0; s < kSiteDim; ++s) {
      const Qn q = sign > 0 ? bond.qn[i] + kSiteQn[s] : bond.qn[i] - kSiteQn[s];
      if (admissible(q, left_sites, right_sites, target)) groups[q].emplace_back(i, s);
    }
  EnlargedSpace e;
  e.sector_of.assign(bond.size(), {-1, -1, -1, -1});
  e.offset_of.assign(bond.size(), {-1, -1, -1, -1});
  for (const auto& [q, members] : groups) {
    const int sector = e.size();
    int off = 0;
    std::vector<EnlargedSpace::Piece> pieces;
    for (auto [i, s] : members) {
      pieces.push_back({i, s, off});
      e.sector_of[i][s] = sector;
      e.offset_of[i][s] = off;
      off += bond.dim[i];
    }
    e.qn.push_back(q);
    e.dim.push_back(off);
    e.pieces.push_back(std::move(pieces));
  }
  return e;
}

}  // namespace

EnlargedSpace EnlargedSpace::left_of(const BondSpace& bond, int left_sites, int right_sites, Qn target) {
  return enlarge(bond, +1, left_sites, right_sites, target);
}

EnlargedSpace EnlargedSpace::right_of(const BondSpace& bond, int left_sites, int right_sites, Qn target) {
  return enlarge(bond, -1, left_sites, right_sites, target);
}

Eigen::MatrixXd SiteTensor::dense(int s) const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(left.total(), right.total());
  for (int i = 0; i < left.size(); ++i) {
    if (block[s][i].size() == 0) continue;
    const int j = right_sector(i, s);
    m.block(left.offset(i), right.offset(j), left.dim[i], right.dim[j]) = block[s][i];
  }
  return m;
}

SiteTensor from_left_matrices(const BondSpace& left, const EnlargedSpace& el, const BondSpace& right,
                              const std::vector<Eigen::MatrixXd>& u) {
  SiteTensor t{left, right, {}};
  for (int s = 0; s < kSiteDim; ++s) t.block[s].resize(left.size());
  for (int i = 0; i < left.size(); ++i)
    for (int s = 0; s < kSiteDim; ++s) {
      const int q = el.sector_of[i][s];
      if (q < 0) continue;
      const int j = right.find(el.qn[q]);
      if (j < 0) continue;
      t.block[s][i] = u[j].middleRows(el.offset_of[i][s], left.dim[i]);
    }
  return t;
}

std::vector<Eigen::MatrixXd> to_left_matrices(const SiteTensor& t, const EnlargedSpace& el) {
  std::vector<Eigen::MatrixXd> u(t.right.size());
  for (int j = 0; j < t.right.size(); ++j) {
    const int q = el.find(t.right.qn[j]);
    if (q < 0) throw std::logic_error("site tensor sector outside the enlarged space");
    u[j] = Eigen::MatrixXd::Zero(el.dim[q], t.right.dim[j]);
    for (const auto& p : el.pieces[q])
      if (t.block[p.s][p.bond].size() > 0) u[j].middleRows(p.offset, t.left.dim[p.bond]) = t.block[p.s][p.bond];
  }
  return u;
}

SiteTensor from_right_matrices(const BondSpace& left, const EnlargedSpace& er, const BondSpace& right,
                               const std::vector<Eigen::MatrixXd>& vt) {
  SiteTensor t{left, right, {}};
  for (int s = 0; s < kSiteDim; ++s) t.block[s].resize(left.size());
  for (int i = 0; i < left.size(); ++i) {
    const int q = er.find(left.qn[i]);
    if (q < 0) continue;
    for (const auto& p : er.pieces[q]) t.block[p.s][i] = vt[i].middleCols(p.offset, right.dim[p.bond]);
  }
  return t;
}

std::vector<Eigen::MatrixXd> to_right_matrices(const SiteTensor& t, const EnlargedSpace& er) {
  std::vector<Eigen::MatrixXd> vt(t.left.size());
  for (int i = 0; i < t.left.size(); ++i) {
    const int q = er.find(t.left.qn[i]);
    if (q < 0) throw std::logic_error("site tensor sector outside the enlarged space");
    vt[i] = Eigen::MatrixXd::Zero(t.left.dim[i], er.dim[q]);
    for (const auto& p : er.pieces[q])
      if (t.block[p.s][i].size() > 0) vt[i].middleCols(p.offset, t.right.dim[p.bond]) = t.block[p.s][i];
  }
  return vt;
}

}  // namespace qidmrg
