#include "qidmrg/mpo.hpp"

#include <map>
#include <stdexcept>

namespace qidmrg {

Eigen::Matrix4d local_ladder(int spin, bool dagger) {
  Eigen::Matrix4d c = Eigen::Matrix4d::Zero();  // creation, row = result
  if (spin == 0) {
    c(2, 0) = 1.0;  // up on |0>
    c(3, 1) = 1.0;  // up on |dn> = |updn>
  } else {
    c(1, 0) = 1.0;
    c(3, 2) = -1.0;  // dn on |up> = -|updn>
  }
  return dagger ? c : Eigen::Matrix4d(c.transpose());
}

Eigen::Matrix4d local_parity() {
  return Eigen::Vector4d(kSiteParity[0], kSiteParity[1], kSiteParity[2], kSiteParity[3]).asDiagonal();
}

std::vector<OpTerm> hamiltonian_terms(const IntegralSet& h) {
  const int n = h.norb();
  std::vector<OpTerm> terms;
  if (h.core_energy() != 0.0) terms.push_back({h.core_energy(), {}});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double t = h.one_body(i, j);
      if (t == 0.0) continue;
      for (int s = 0; s < 2; ++s) terms.push_back({t, {{2 * i + s, true}, {2 * j + s, false}}});
    }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          const double v = coulomb_coefficient(h, i, j, k, l);
          if (v == 0.0) continue;
          for (int s = 0; s < 2; ++s)
            for (int r = 0; r < 2; ++r) {
              if ((i == j && s == r) || (k == l && s == r)) continue;  // c+c+ or cc on one mode
              terms.push_back({v, {{2 * i + s, true}, {2 * j + r, true}, {2 * k + r, false}, {2 * l + s, false}}});
            }
        }
  return terms;
}

std::vector<OpTerm> s2_terms(int n) {
  std::vector<OpTerm> terms;
  const double sign[2] = {1.0, -1.0};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      terms.push_back({1.0, {{2 * i + 1, true}, {2 * i, false}, {2 * j, true}, {2 * j + 1, false}}});
      for (int s = 0; s < 2; ++s)
        for (int r = 0; r < 2; ++r)
          terms.push_back({0.25 * sign[s] * sign[r], {{2 * i + s, true}, {2 * i + s, false}, {2 * j + r, true}, {2 * j + r, false}}});
    }
  for (int i = 0; i < n; ++i)
    for (int s = 0; s < 2; ++s) terms.push_back({0.5 * sign[s], {{2 * i + s, true}, {2 * i + s, false}}});
  return terms;
}

int Mpo::max_bond() const {
  int m = 0;
  for (const auto& s : shift) m = std::max(m, static_cast<int>(s.size()));
  return m;
}

namespace {

Qn op_qn(const LadderOp& o) {
  const Qn q{1, o.spin() == 0 ? 1 : -1};
  return o.dagger ? q : -q;
}

Qn string_qn(std::vector<LadderOp>::const_iterator b, std::vector<LadderOp>::const_iterator e) {
  Qn q;
  for (; b != e; ++b) q = q + op_qn(*b);
  return q;
}

using Key = std::pair<int, std::vector<LadderOp>>;  // (0 = left part, 1 = right part), string

}  // namespace

Mpo build_mpo(int n, const std::vector<OpTerm>& terms) {
  if (n < 1) throw std::invalid_argument("build_mpo: empty chain");
  Mpo mpo;
  mpo.n_sites = n;
  mpo.shift.resize(n + 1);
  mpo.site.resize(n);
  std::vector<std::map<Key, int>> channel(n + 1);
  std::vector<std::map<std::pair<int, int>, Eigen::Matrix4d>> entry(n);

  auto label = [&](int cut, Key key, Qn shift) {
    auto [it, inserted] = channel[cut].try_emplace(std::move(key), static_cast<int>(mpo.shift[cut].size()));
    if (inserted) mpo.shift[cut].push_back(shift);
    return it->second;
  };
  label(0, {0, {}}, {});
  label(n, {1, {}}, {});

  const Eigen::Matrix4d parity = local_parity();
  for (const auto& term : terms) {
    std::vector<LadderOp> ops = term.ops;
    double coef = term.coef;
    for (const auto& o : ops)
      if (o.mode < 0 || o.mode >= 2 * n) throw std::out_of_range("build_mpo: mode outside the chain");
    // Stable sort by mode; every exchange of distinct modes flips the sign.
    for (std::size_t a = 1; a < ops.size(); ++a)
      for (std::size_t b = a; b > 0 && ops[b - 1].mode > ops[b].mode; --b) {
        std::swap(ops[b - 1], ops[b]);
        coef = -coef;
      }
    const int k = static_cast<int>(ops.size());
    std::vector<int> before(n + 1, 0);  // operators on sites < cut
    for (int c = 0; c <= n; ++c)
      for (const auto& o : ops) before[c] += o.site() < c;

    std::vector<Eigen::Matrix4d> local(n, Eigen::Matrix4d::Identity());
    bool zero = false;
    for (int t = 0; t < n && !zero; ++t) {
      for (int a = before[t]; a < before[t + 1]; ++a) local[t] = local[t] * local_ladder(ops[a].spin(), ops[a].dagger);
      if ((k - before[t + 1]) % 2) local[t] = local[t] * parity;
      zero = local[t].isZero(0.0);
    }
    if (zero) continue;

    auto is_left = [&](int c) { return before[c] < k - before[c] || (2 * before[c] == k && 2 * c <= n); };
    int pivot = 0;
    while (pivot + 1 <= n && is_left(pivot + 1)) ++pivot;
    auto id = [&](int c) {
      if (is_left(c))
        return label(c, {0, std::vector<LadderOp>(ops.begin(), ops.begin() + before[c])},
                     string_qn(ops.begin(), ops.begin() + before[c]));
      return label(c, {1, std::vector<LadderOp>(ops.begin() + before[c], ops.end())},
                   -string_qn(ops.begin() + before[c], ops.end()));
    };
    int from = id(0);
    for (int t = 0; t < n; ++t) {
      const int to = id(t + 1);
      auto [it, inserted] = entry[t].try_emplace({from, to}, Eigen::Matrix4d::Zero());
      if (t == pivot)
        it->second += coef * local[t];
      else
        it->second = local[t];
      from = to;
    }
  }
  for (int t = 0; t < n; ++t)
    for (const auto& [key, op] : entry[t])
      if (!op.isZero(0.0)) mpo.site[t].push_back({key.first, key.second, op});
  return mpo;
}

Environment enlarge_left(const Environment& env, const EnlargedSpace& el, const Mpo& mpo, int t) {
  Environment out;
  for (const Qn& q : mpo.shift[t + 1]) out.emplace_back(q, el.size());
  for (const auto& e : mpo.site[t]) {
    const SectorOp& l = env[e.from];
    SectorOp& o = out[e.to];
    for (int src = 0; src < static_cast<int>(l.target.size()); ++src) {
      if (!l.has(src)) continue;
      const int dst = l.target[src];
      for (int sp = 0; sp < kSiteDim; ++sp) {
        const int qs = el.sector_of[src][sp];
        if (qs < 0) continue;
        for (int s = 0; s < kSiteDim; ++s) {
          const double v = e.op(s, sp);
          if (v == 0.0) continue;
          const int qd = el.sector_of[dst][s];
          if (qd < 0) continue;
          if (o.target[qs] < 0) {
            o.target[qs] = qd;
            o.block[qs] = Eigen::MatrixXd::Zero(el.dim[qd], el.dim[qs]);
          } else if (o.target[qs] != qd) {
            throw std::logic_error("enlarge_left: inconsistent quantum-number shift");
          }
          o.block[qs].block(el.offset_of[dst][s], el.offset_of[src][sp], l.block[src].rows(), l.block[src].cols()) +=
              v * l.block[src];
        }
      }
    }
  }
  return out;
}

Environment enlarge_right(const Environment& env, const EnlargedSpace& er, const Mpo& mpo, int t) {
  Environment out;
  for (const Qn& q : mpo.shift[t]) out.emplace_back(q, er.size());
  for (const auto& e : mpo.site[t]) {
    const SectorOp& r = env[e.to];
    SectorOp& o = out[e.from];
    for (int src = 0; src < static_cast<int>(r.target.size()); ++src) {
      if (!r.has(src)) continue;
      const int dst = r.target[src];
      for (int sp = 0; sp < kSiteDim; ++sp) {
        const int qs = er.sector_of[src][sp];
        if (qs < 0) continue;
        for (int s = 0; s < kSiteDim; ++s) {
          const double v = e.op(s, sp);
          if (v == 0.0) continue;
          const int qd = er.sector_of[dst][s];
          if (qd < 0) continue;
          if (o.target[qs] < 0) {
            o.target[qs] = qd;
            o.block[qs] = Eigen::MatrixXd::Zero(er.dim[qd], er.dim[qs]);
          } else if (o.target[qs] != qd) {
            throw std::logic_error("enlarge_right: inconsistent quantum-number shift");
          }
          o.block[qs].block(er.offset_of[dst][s], er.offset_of[src][sp], r.block[src].rows(), r.block[src].cols()) +=
              v * r.block[src];
        }
      }
    }
  }
  return out;
}

Environment project_left(const Environment& ops, const EnlargedSpace& el, const BondSpace& bond,
                         const std::vector<Eigen::MatrixXd>& u) {
  Environment out;
  for (const auto& op : ops) {
    SectorOp o(op.shift, bond.size());
    for (int js = 0; js < bond.size(); ++js) {
      const int qs = el.find(bond.qn[js]);
      if (qs < 0 || !op.has(qs)) continue;
      const int jd = bond.find(el.qn[op.target[qs]]);
      if (jd < 0) continue;
      o.target[js] = jd;
      o.block[js] = u[jd].transpose() * op.block[qs] * u[js];
    }
    out.push_back(std::move(o));
  }
  return out;
}

Environment project_right(const Environment& ops, const EnlargedSpace& er, const BondSpace& bond,
                          const std::vector<Eigen::MatrixXd>& vt) {
  Environment out;
  for (const auto& op : ops) {
    SectorOp o(op.shift, bond.size());
    for (int is = 0; is < bond.size(); ++is) {
      const int qs = er.find(bond.qn[is]);
      if (qs < 0 || !op.has(qs)) continue;
      const int id = bond.find(er.qn[op.target[qs]]);
      if (id < 0) continue;
      o.target[is] = id;
      o.block[is] = vt[id] * op.block[qs] * vt[is].transpose();
    }
    out.push_back(std::move(o));
  }
  return out;
}

Environment left_edge(const Mpo& mpo, const BondSpace& bond) {
  if (mpo.channels(0) != 1 || bond.size() != 1 || bond.dim[0] != 1) throw std::logic_error("left_edge: bad cut 0");
  SectorOp o(Qn{}, 1);
  o.target[0] = 0;
  o.block[0] = Eigen::MatrixXd::Ones(1, 1);
  return {o};
}

Environment right_edge(const Mpo& mpo, const BondSpace& bond) {
  const int n = mpo.n_sites;
  if (mpo.channels(n) != 1 || bond.size() != 1 || bond.dim[0] != 1) throw std::logic_error("right_edge: bad last cut");
  SectorOp o(mpo.shift[n][0], 1);
  o.target[0] = 0;
  o.block[0] = Eigen::MatrixXd::Ones(1, 1);
  return {o};
}

}  // namespace qidmrg
