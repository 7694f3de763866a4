#pragma once

#include <Eigen/Dense>
#include <array>
#include <compare>
#include <vector>

/// Quantum-number resolved spaces and block-sparse operators for the chain.
///
/// Every bond space at cut c (between orbital c-1 and orbital c, 0-based) is
/// labelled by the total (n, 2sz) of orbitals 0..c-1. A state of the sites to
/// the right of the cut therefore carries the label target - q(right part).
namespace qidmrg {

struct Qn {
  int n = 0;
  int sz2 = 0;

  friend Qn operator+(Qn a, Qn b) { return {a.n + b.n, a.sz2 + b.sz2}; }
  friend Qn operator-(Qn a, Qn b) { return {a.n - b.n, a.sz2 - b.sz2}; }
  friend Qn operator-(Qn a) { return {-a.n, -a.sz2}; }
  auto operator<=>(const Qn&) const = default;
};

constexpr int kSiteDim = 4;
/// Local basis 0, down, up, updown.
inline constexpr std::array<Qn, 4> kSiteQn{Qn{0, 0}, Qn{1, -1}, Qn{1, 1}, Qn{2, 0}};
inline constexpr std::array<int, 4> kSiteParity{1, -1, -1, 1};

/// Whether `q` on `sites` orbitals is a valid occupation pattern.
bool fits(Qn q, int sites);
/// Whether a label at a cut with `left_sites` orbitals on the left can be
/// completed to `target` by the `right_sites` orbitals on the right.
bool admissible(Qn q, int left_sites, int right_sites, Qn target);

struct BondSpace {
  std::vector<Qn> qn;  // sorted, unique
  std::vector<int> dim;

  int size() const { return static_cast<int>(qn.size()); }
  int total() const;
  int offset(int sector) const;
  int find(Qn q) const;  // -1 if absent

  static BondSpace single(Qn q) { return {{q}, {1}}; }
};

/// Bond space combined with one site. Built from the bond on the left of the
/// site (labels q + q(s)) or on its right (labels q - q(s)); labels that cannot
/// reach the target are pruned.
struct EnlargedSpace {
  struct Piece {
    int bond;
    int s;
    int offset;
  };

  std::vector<Qn> qn;
  std::vector<int> dim;
  std::vector<std::vector<Piece>> pieces;
  std::vector<std::array<int, 4>> sector_of;  // [bond sector][s], -1 if pruned
  std::vector<std::array<int, 4>> offset_of;

  int size() const { return static_cast<int>(qn.size()); }
  int total() const;
  int find(Qn q) const;

  static EnlargedSpace left_of(const BondSpace& bond, int left_sites, int right_sites, Qn target);
  static EnlargedSpace right_of(const BondSpace& bond, int left_sites, int right_sites, Qn target);
};

/// Operator with a definite quantum-number shift: block[src] maps source
/// sector src to sector target[src] (rows = target states).
struct SectorOp {
  Qn shift;
  std::vector<int> target;
  std::vector<Eigen::MatrixXd> block;

  SectorOp() = default;
  SectorOp(Qn shift_, int n_sectors) : shift(shift_), target(n_sectors, -1), block(n_sectors) {}
  bool has(int src) const { return target[src] >= 0; }
};

/// One operator per MPO channel at a given cut.
using Environment = std::vector<SectorOp>;

/// MPS tensor of one site: block[s][i] couples left sector i to the right
/// sector labelled left.qn[i] + q(s); empty when that sector is absent.
struct SiteTensor {
  BondSpace left, right;
  std::array<std::vector<Eigen::MatrixXd>, 4> block;

  int right_sector(int i, int s) const { return right.find(left.qn[i] + kSiteQn[s]); }
  /// Dense (left.total x right.total) matrix of local state s.
  Eigen::MatrixXd dense(int s) const;
};

/// U (per right sector, rows in `el`) -> left-canonical site tensor.
SiteTensor from_left_matrices(const BondSpace& left, const EnlargedSpace& el, const BondSpace& right,
                              const std::vector<Eigen::MatrixXd>& u);
std::vector<Eigen::MatrixXd> to_left_matrices(const SiteTensor& t, const EnlargedSpace& el);
/// V^T (per left sector, columns in `er`) -> right-canonical site tensor.
SiteTensor from_right_matrices(const BondSpace& left, const EnlargedSpace& er, const BondSpace& right,
                               const std::vector<Eigen::MatrixXd>& vt);
std::vector<Eigen::MatrixXd> to_right_matrices(const SiteTensor& t, const EnlargedSpace& er);

}  // namespace qidmrg
