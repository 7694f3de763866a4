#include "qidmrg/dmrg.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "qidmrg/davidson.hpp"

namespace qidmrg {

void SweepConfig::validate() const {
  if (!(chi > 0.0)) throw std::invalid_argument("chi must be positive");
  if (m_min < 1) throw std::invalid_argument("m_min must be >= 1");
  if (m_cap < m_min) throw std::invalid_argument("m_cap must be >= m_min");
  if (m_start < 1) throw std::invalid_argument("m_start must be >= 1");
  if (max_sweeps < 0) throw std::invalid_argument("max_sweeps must be >= 0");
  if (!(convergence_tol > 0.0)) throw std::invalid_argument("convergence_tol must be positive");
  if (!(solver_tol > 0.0)) throw std::invalid_argument("solver_tol must be positive");
}

double von_neumann(const std::vector<double>& weights) {
  double s = 0.0;
  for (double w : weights)
    if (w > 0.0) s -= w * std::log(w);
  return s;
}

TruncationRecord dbss_truncate(const SchmidtSpectrum& spectrum, const SweepConfig& cfg) {
  const auto& w = spectrum.weights;
  const int n = static_cast<int>(w.size());
  TruncationRecord r;
  r.cut = spectrum.cut;
  r.available = n;
  r.entropy_before = von_neumann(w);

  auto term = [&](int i) { return w[i] > 0.0 ? -w[i] * std::log(w[i]) : 0.0; };
  int m = 0;
  double partial = 0.0;
  while (m < n) {
    partial += term(m++);
    if (r.entropy_before - partial < cfg.chi) break;
  }
  auto extend = [&](int k) {
    while (k > 0 && k < n && k < cfg.m_cap && w[k] > 1e-14 && w[k - 1] - w[k] <= 1e-8 * w[k - 1]) ++k;
    return k;
  };
  m = extend(m);
  if (m < std::min(cfg.m_min, n)) m = extend(std::min(cfg.m_min, n));
  if (m > cfg.m_cap) {
    m = cfg.m_cap;
    r.clamped = true;
  }
  r.kept = m;
  r.m_used = m;
  for (int i = 0; i < n; ++i) {
    if (i < m)
      r.entropy_after += term(i);
    else
      r.discarded_weight += w[i];
  }
  r.info_loss = r.entropy_before - r.entropy_after;
  return r;
}

namespace {

struct Svd {
  std::vector<Eigen::MatrixXd> u, vt;
  std::vector<Eigen::VectorXd> s;
};

Svd svd_blocks(const Theta& th) {
  Svd d;
  for (const auto& b : th.block) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(b, Eigen::ComputeThinU | Eigen::ComputeThinV);
    d.u.push_back(svd.matrixU());
    d.s.push_back(svd.singularValues());
    d.vt.push_back(svd.matrixV().transpose());
  }
  return d;
}

std::vector<double> eigen_weights(const Eigen::MatrixXd& rho) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(rho, Eigen::EigenvaluesOnly);
  return {es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size()};
}

struct Superblock {
  Environment opl, opr;
  std::vector<int> theta_of_l, theta_of_r;
  std::vector<Eigen::Index> offset;
  Eigen::Index size = 0;
};

struct Weight {
  double w;
  int sector;
  int index;
};

}  // namespace

SchmidtSpectrum schmidt_spectrum(const Theta& th) {
  SchmidtSpectrum sp;
  sp.cut = th.pos + 1;
  for (const auto& b : th.block) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(b);
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
      sp.weights.push_back(svd.singularValues()[i] * svd.singularValues()[i]);
  }
  std::sort(sp.weights.rbegin(), sp.weights.rend());
  return sp;
}

double expectation(const Mps& psi, const Mpo& mpo) {
  const int n = psi.n_sites();
  if (mpo.n_sites != n) throw std::invalid_argument("expectation: MPO and MPS lengths differ");
  Environment env = left_edge(mpo, psi.sites[0].left);
  for (int t = 0; t < n; ++t) {
    const SiteTensor& a = psi.sites[t];
    const EnlargedSpace el = EnlargedSpace::left_of(a.left, t + 1, n - t - 1, psi.target);
    const Environment ops = enlarge_left(env, el, mpo, t);
    env = project_left(ops, el, a.right, to_left_matrices(a, el));
  }
  return env[0].has(0) ? env[0].block[0](0, 0) : 0.0;
}

namespace {

class Engine {
 public:
  Engine(const IntegralSet& h, const SweepConfig& cfg, Qn target, DmrgResult& res)
      : h_(h), n_(h.norb()), target_(target), cfg_(cfg), res_(res) {
    mpo_ = build_mpo(n_, hamiltonian_terms(h));
    bond_.resize(n_ + 1);
    site_.resize(n_);
    lenv_.resize(n_ + 1);
    renv_.resize(n_ + 1);
    bond_[0] = BondSpace::single(Qn{});
    bond_[n_] = BondSpace::single(target_);
    lenv_[0] = left_edge(mpo_, bond_[0]);
  }

  void warmup(const Warmup& w, const cideas::CasVector& casv, const std::vector<double>& s1) {
    profile_.assign(n_ + 1, 0.0);
    sites_s1_.assign(n_, 0.0);
    warming_ = true;
    for (int t = 0; t <= n_ - 2; ++t) {
      build_environment(t, w, casv, s1);
      step(t, true, t == n_ - 2, 0);
    }
    warming_ = false;
    finish_half(0);
    res_.block_entropy.push_back(profile_);
    res_.site_entropy.push_back(sites_s1_);
  }

  void sweep(int index) {
    const int half_rl = 2 * index - 1, half_lr = 2 * index;
    for (int t = n_ - 2; t >= 0; --t) step(t, false, t == 0, half_rl);
    finish_half(half_rl);
    for (int t = 0; t <= n_ - 2; ++t) step(t, true, t == n_ - 2, half_lr);
    finish_half(half_lr);
    res_.block_entropy.push_back(profile_);
    res_.site_entropy.push_back(sites_s1_);
  }

  double last_energy() const { return last_energy_; }

  Mps final_state() const {
    // theta_ sits at (n-2, n-1) after a left-to-right half-sweep.
    Mps psi;
    psi.target = target_;
    psi.sites.assign(site_.begin(), site_.end());
    const Svd d = svd_blocks(theta_);
    BondSpace mid;
    std::vector<Eigen::MatrixXd> u, svt;
    for (std::size_t k = 0; k < theta_.block.size(); ++k) {
      mid.qn.push_back(theta_.qn[k]);
      mid.dim.push_back(static_cast<int>(d.s[k].size()));
      u.push_back(d.u[k]);
      svt.push_back(Eigen::MatrixXd(d.s[k].asDiagonal() * d.vt[k]));
    }
    psi.sites[n_ - 2] = from_left_matrices(bond_[n_ - 2], theta_.el, mid, u);
    psi.sites[n_ - 1] = from_right_matrices(mid, theta_.er, bond_[n_], svt);
    return psi;
  }

 private:
  enum class Pending { None, Right, Left };

  void finish_half(int half) {
    res_.half_sweep_energy.push_back(last_energy_);
    (void)half;
  }

  // Environment basis for warm-up step t: determinants on sites t+2..n-1,
  // encoded as a right-canonical determinant MPS.
  void build_environment(int t, const Warmup& w, const cideas::CasVector& casv, const std::vector<double>& s1) {
    renv_[n_] = right_edge(mpo_, bond_[n_]);
    if (t + 2 >= n_) return;
    std::vector<int> env;
    for (int o = t + 2; o < n_; ++o) env.push_back(o);
    const BondSpace& left = bond_[t];
    auto feasible = [&](Qn q_env) {
      const Qn need = target_ - q_env;
      for (const Qn& ql : left.qn)
        for (const Qn& a : kSiteQn)
          for (const Qn& b : kSiteQn)
            if (ql + a + b == need) return true;
      return false;
    };
    const int m_l = left.total();
    std::vector<cideas::EnvState> states;
    cideas::WarmupConfig wc = w.config;
    wc.m_start = cfg_.m_start;
    if (w.kind == WarmupKind::Naive) {
      wc.ci_level_cap = 0;
      wc.m_start = 1;
      const auto cls = cideas::classify_environment(h_.meta().hf_occupation, casv, env, static_cast<int>(env.size()));
      for (; states.empty(); ++wc.ci_level_cap) {
        try {
          states = cideas::build_environment_basis(h_, cls, wc, 1, s1, casv, feasible);
        } catch (const cideas::InfeasibleError&) {
          if (wc.ci_level_cap > 2 * n_) throw;
        }
      }
      states.resize(1);
    } else {
      for (int budget = wc.active_budget; states.empty(); ++budget) {
        const auto cls = cideas::classify_environment(h_.meta().hf_occupation, casv, env, budget);
        try {
          states = cideas::build_environment_basis(h_, cls, wc, m_l, s1, casv, feasible);
        } catch (const cideas::InfeasibleError&) {
          if (budget >= static_cast<int>(env.size())) throw;
        }
      }
    }

    // Suffix trie: at cut c the states are the distinct tails on sites >= c.
    auto tail = [&](fci::Det d, int c) { return c >= 32 ? fci::Det{0} : d >> (2 * c); };
    auto tail_qn = [&](fci::Det d, int c) {
      Qn q;
      for (int o = c; o < n_; ++o) q = q + kSiteQn[fci::local_state(d, o)];
      return q;
    };
    std::vector<std::map<std::pair<Qn, fci::Det>, int>> index(n_ + 1);
    for (int c = t + 2; c <= n_; ++c) {
      std::map<Qn, std::vector<fci::Det>> by_label;
      for (const auto& st : states) by_label[target_ - tail_qn(st.det, c)].push_back(tail(st.det, c));
      BondSpace b;
      for (auto& [q, tails] : by_label) {
        std::sort(tails.begin(), tails.end());
        tails.erase(std::unique(tails.begin(), tails.end()), tails.end());
        for (std::size_t a = 0; a < tails.size(); ++a) index[c][{q, tails[a]}] = static_cast<int>(a);
        b.qn.push_back(q);
        b.dim.push_back(static_cast<int>(tails.size()));
      }
      bond_[c] = b;
    }
    for (int c = n_ - 1; c >= t + 2; --c) {
      SiteTensor tensor{bond_[c], bond_[c + 1], {}};
      for (int s = 0; s < kSiteDim; ++s) tensor.block[s].resize(bond_[c].size());
      for (const auto& [key, a] : index[c]) {
        const int i = bond_[c].find(key.first);
        const int s = ((key.second & 1ULL) ? 2 : 0) + ((key.second & 2ULL) ? 1 : 0);
        const fci::Det next = key.second >> 2;
        const Qn qn_next = key.first + kSiteQn[s];
        const int j = bond_[c + 1].find(qn_next);
        auto& blk = tensor.block[s][i];
        if (blk.size() == 0) blk = Eigen::MatrixXd::Zero(bond_[c].dim[i], bond_[c + 1].dim[j]);
        blk(a, index[c + 1].at({qn_next, next})) = 1.0;
      }
      const EnlargedSpace er = EnlargedSpace::right_of(bond_[c + 1], c, n_ - c, target_);
      const Environment ops = enlarge_right(renv_[c + 1], er, mpo_, c);
      renv_[c] = project_right(ops, er, bond_[c], to_right_matrices(tensor, er));
    }
  }

  Superblock superblock(int t, Theta& th) const {
    th = Theta{};
    th.pos = t;
    th.el = EnlargedSpace::left_of(bond_[t], t + 1, n_ - t - 1, target_);
    th.er = EnlargedSpace::right_of(bond_[t + 2], t + 1, n_ - t - 1, target_);
    Superblock sb;
    sb.opl = enlarge_left(lenv_[t], th.el, mpo_, t);
    sb.opr = enlarge_right(renv_[t + 2], th.er, mpo_, t + 1);
    sb.theta_of_l.assign(th.el.size(), -1);
    sb.theta_of_r.assign(th.er.size(), -1);
    for (int q = 0; q < th.el.size(); ++q) {
      const int r = th.er.find(th.el.qn[q]);
      if (r < 0) continue;
      const int k = static_cast<int>(th.qn.size());
      sb.theta_of_l[q] = k;
      sb.theta_of_r[r] = k;
      th.qn.push_back(th.el.qn[q]);
      th.l_sector.push_back(q);
      th.r_sector.push_back(r);
      sb.offset.push_back(sb.size);
      sb.size += static_cast<Eigen::Index>(th.el.dim[q]) * th.er.dim[r];
    }
    if (sb.size == 0) throw std::logic_error("superblock has no admissible sector");
    return sb;
  }

  static void apply(const Superblock& sb, const Theta& th, const Eigen::VectorXd& x, Eigen::VectorXd& y) {
    y = Eigen::VectorXd::Zero(x.size());
    for (std::size_t k = 0; k < th.qn.size(); ++k) {
      const int lq = th.l_sector[k], rq = th.r_sector[k];
      const Eigen::Map<const Eigen::MatrixXd> in(x.data() + sb.offset[k], th.el.dim[lq], th.er.dim[rq]);
      for (std::size_t w = 0; w < sb.opl.size(); ++w) {
        const SectorOp& a = sb.opl[w];
        const SectorOp& b = sb.opr[w];
        if (!a.has(lq) || !b.has(rq)) continue;
        const int kk = sb.theta_of_l[a.target[lq]];
        if (kk < 0 || sb.theta_of_r[b.target[rq]] != kk) continue;
        Eigen::Map<Eigen::MatrixXd> out(y.data() + sb.offset[kk], th.el.dim[th.l_sector[kk]],
                                        th.er.dim[th.r_sector[kk]]);
        const Eigen::MatrixXd left = a.block[lq] * in;
        out.noalias() += left * b.block[rq].transpose();
      }
    }
  }

  static Eigen::VectorXd diagonal(const Superblock& sb, const Theta& th) {
    Eigen::VectorXd d = Eigen::VectorXd::Zero(sb.size);
    for (std::size_t w = 0; w < sb.opl.size(); ++w) {
      if (sb.opl[w].shift != Qn{}) continue;
      for (std::size_t k = 0; k < th.qn.size(); ++k) {
        const int lq = th.l_sector[k], rq = th.r_sector[k];
        const SectorOp& a = sb.opl[w];
        const SectorOp& b = sb.opr[w];
        if (!a.has(lq) || !b.has(rq) || a.target[lq] != lq || b.target[rq] != rq) continue;
        Eigen::Map<Eigen::MatrixXd> out(d.data() + sb.offset[k], th.el.dim[lq], th.er.dim[rq]);
        out.noalias() += a.block[lq].diagonal() * b.block[rq].diagonal().transpose();
      }
    }
    return d;
  }

  // Guess for the superblock at th.pos from the pending center.
  bool predict(Theta& th) const {
    if (pending_ == Pending::None) return false;
    th.block.assign(th.qn.size(), {});
    for (std::size_t k = 0; k < th.qn.size(); ++k)
      th.block[k] = Eigen::MatrixXd::Zero(th.el.dim[th.l_sector[k]], th.er.dim[th.r_sector[k]]);
    const int t = th.pos;
    if (pending_ == Pending::Right) {
      // center: bond[t] x (site t, bond[t+1]) in center_space_; next: B at t+1.
      const SiteTensor& b = site_[t + 1];
      for (std::size_t k = 0; k < th.qn.size(); ++k) {
        const Qn q = th.qn[k];
        const int x = bond_[t + 1].find(q);
        if (x < 0) continue;
        for (const auto& pl : th.el.pieces[th.l_sector[k]]) {
          const int co = center_space_.sector_of[x][pl.s];
          if (co < 0) continue;
          const Eigen::MatrixXd& c = center_[pl.bond];
          for (const auto& pr : th.er.pieces[th.r_sector[k]]) {
            const auto& bb = b.block[pr.s][x];
            if (bb.size() == 0 || b.right_sector(x, pr.s) != pr.bond) continue;
            th.block[k].block(pl.offset, pr.offset, bond_[t].dim[pl.bond], bond_[t + 2].dim[pr.bond]) +=
                c.middleCols(center_space_.offset_of[x][pl.s], bond_[t + 1].dim[x]) * bb;
          }
        }
      }
    } else {
      // center: (bond[t+1], site t+1) x bond[t+2] in center_space_; previous: A at t.
      const SiteTensor& a = site_[t];
      for (std::size_t k = 0; k < th.qn.size(); ++k) {
        const Qn q = th.qn[k];
        const int x = bond_[t + 1].find(q);
        if (x < 0) continue;
        for (const auto& pl : th.el.pieces[th.l_sector[k]]) {
          const auto& aa = a.block[pl.s][pl.bond];
          if (aa.size() == 0 || a.right_sector(pl.bond, pl.s) != x) continue;
          for (const auto& pr : th.er.pieces[th.r_sector[k]]) {
            const int co = center_space_.sector_of[x][pr.s];
            if (co < 0) continue;
            const Eigen::MatrixXd& c = center_[pr.bond];
            th.block[k].block(pl.offset, pr.offset, bond_[t].dim[pl.bond], bond_[t + 2].dim[pr.bond]) +=
                aa * c.middleRows(center_space_.offset_of[x][pr.s], bond_[t + 1].dim[x]);
          }
        }
      }
    }
    return true;
  }

  void step(int t, bool ltr, bool turn, int half) {
    Theta th;
    const Superblock sb = superblock(t, th);
    Eigen::MatrixXd guess(sb.size, 0);
    if (keep_theta_ && theta_.pos == t && theta_.qn == th.qn) {
      guess.resize(sb.size, 1);
      for (std::size_t k = 0; k < th.qn.size(); ++k)
        guess.col(0).segment(sb.offset[k], theta_.block[k].size()) =
            Eigen::Map<const Eigen::VectorXd>(theta_.block[k].data(), theta_.block[k].size());
    } else if (predict(th)) {
      guess.resize(sb.size, 1);
      for (std::size_t k = 0; k < th.qn.size(); ++k)
        guess.col(0).segment(sb.offset[k], th.block[k].size()) =
            Eigen::Map<const Eigen::VectorXd>(th.block[k].data(), th.block[k].size());
    }
    keep_theta_ = false;
    pending_ = Pending::None;

    DavidsonOptions opts;
    opts.tolerance = cfg_.solver_tol;
    const auto sol = davidson([&](const Eigen::VectorXd& x, Eigen::VectorXd& y) { apply(sb, th, x, y); },
                              diagonal(sb, th), guess, opts);
    th.block.assign(th.qn.size(), {});
    for (std::size_t k = 0; k < th.qn.size(); ++k) {
      const int rows = th.el.dim[th.l_sector[k]], cols = th.er.dim[th.r_sector[k]];
      th.block[k] = Eigen::Map<const Eigen::MatrixXd>(sol.vectors.col(0).data() + sb.offset[k], rows, cols);
    }
    last_energy_ = sol.values[0];

    StepRecord rec;
    rec.half_sweep = half;
    rec.position = t;
    rec.left_to_right = ltr;
    rec.energy = sol.values[0];
    rec.residual = sol.residuals[0];
    rec.iterations = sol.iterations;
    rec.superblock_dim = static_cast<int>(sb.size);

    const Svd d = svd_blocks(th);
    std::vector<Weight> all;
    for (std::size_t k = 0; k < d.s.size(); ++k)
      for (Eigen::Index i = 0; i < d.s[k].size(); ++i)
        all.push_back({d.s[k][i] * d.s[k][i], static_cast<int>(k), static_cast<int>(i)});
    std::stable_sort(all.begin(), all.end(), [](const Weight& a, const Weight& b) { return a.w > b.w; });
    SchmidtSpectrum spectrum;
    spectrum.cut = t + 1;
    for (const auto& w : all) spectrum.weights.push_back(w.w);
    const double s_cut = von_neumann(spectrum.weights);
    const double s_previous = profile_[t];
    profile_[t + 1] = s_cut;
    record_spectrum(spectrum);
    measure_sites(th, ltr, t, s_cut, s_previous, half);

    if (turn) {
      rec.bond_dim = static_cast<int>(all.size());
      res_.steps.push_back(rec);
      theta_ = std::move(th);
      keep_theta_ = true;
      return;
    }

    TruncationRecord tr = dbss_truncate(spectrum, cfg_);
    tr.half_sweep = half;
    std::vector<int> kept(th.qn.size(), 0);
    for (int i = 0; i < tr.kept; ++i) kept[all[i].sector] = std::max(kept[all[i].sector], all[i].index + 1);
    BondSpace nb;
    std::vector<Eigen::MatrixXd> u, vt, s;
    for (std::size_t k = 0; k < th.qn.size(); ++k) {
      if (kept[k] == 0) continue;
      nb.qn.push_back(th.qn[k]);
      nb.dim.push_back(kept[k]);
      u.push_back(d.u[k].leftCols(kept[k]));
      vt.push_back(d.vt[k].topRows(kept[k]));
      s.push_back(Eigen::MatrixXd(d.s[k].head(kept[k]).asDiagonal()));
    }
    res_.m_max = std::max(res_.m_max, nb.total());
    rec.bond_dim = nb.total();
    res_.steps.push_back(rec);
    res_.truncations.push_back(tr);

    bond_[t + 1] = nb;
    center_.clear();
    if (ltr) {
      site_[t] = from_left_matrices(bond_[t], th.el, nb, u);
      lenv_[t + 1] = project_left(sb.opl, th.el, nb, u);
      for (std::size_t j = 0; j < u.size(); ++j) center_.push_back(s[j] * vt[j]);
      center_space_ = th.er;
      pending_ = warming_ ? Pending::None : Pending::Right;
    } else {
      site_[t + 1] = from_right_matrices(nb, th.er, bond_[t + 2], vt);
      renv_[t + 1] = project_right(sb.opr, th.er, nb, vt);
      for (std::size_t j = 0; j < u.size(); ++j) center_.push_back(u[j] * s[j]);
      center_space_ = th.el;
      pending_ = Pending::Left;
    }
  }

  void record_spectrum(const SchmidtSpectrum& sp) {
    if (static_cast<int>(spectra_.size()) < n_ + 1) spectra_.resize(n_ + 1);
    spectra_[sp.cut] = sp;
  }

  // Single-orbital entropies of both sites, block entropies and the growth
  // ledger, all from the superblock state before truncation.
  void measure_sites(const Theta& th, bool ltr, int t, double s_cut, double s_previous, int half) {
    Eigen::Vector4d p_left = Eigen::Vector4d::Zero(), p_right = Eigen::Vector4d::Zero();
    std::vector<Eigen::MatrixXd> rho_block(bond_[t].size());
    double s_left = 0.0, s_right = 0.0;
    std::vector<double> wl, wr;
    for (std::size_t k = 0; k < th.qn.size(); ++k) {
      const Eigen::MatrixXd& b = th.block[k];
      for (const auto& pl : th.el.pieces[th.l_sector[k]]) {
        const auto rows = b.middleRows(pl.offset, bond_[t].dim[pl.bond]);
        p_left[pl.s] += rows.squaredNorm();
        if (ltr) {
          auto& r = rho_block[pl.bond];
          if (r.size() == 0) r = Eigen::MatrixXd::Zero(rows.rows(), rows.rows());
          r.noalias() += rows * rows.transpose();
        }
      }
      for (const auto& pr : th.er.pieces[th.r_sector[k]])
        p_right[pr.s] += b.middleCols(pr.offset, bond_[t + 2].dim[pr.bond]).squaredNorm();
      if (ltr) {
        for (double v : eigen_weights(b * b.transpose())) wl.push_back(v);
        for (double v : eigen_weights(b.transpose() * b)) wr.push_back(v);
      }
    }
    auto entropy4 = [](const Eigen::Vector4d& p) { return von_neumann({p[0], p[1], p[2], p[3]}); };
    sites_s1_[t] = entropy4(p_left);
    sites_s1_[t + 1] = entropy4(p_right);
    if (!ltr) return;
    s_left = von_neumann(wl);
    s_right = von_neumann(wr);
    std::vector<double> wb;
    for (const auto& r : rho_block)
      if (r.size() > 0)
        for (double v : eigen_weights(r)) wb.push_back(v);
    GrowthRecord g;
    g.half_sweep = half;
    g.cut = t;
    g.s_block = t == 0 ? 0.0 : von_neumann(wb);
    g.s_block_previous = t == 0 ? 0.0 : s_previous;
    g.s_site = sites_s1_[t];
    g.s_grown = s_cut;
    g.growth = g.s_grown - g.s_block - g.s_site;
    g.s_left = s_left;
    g.s_right = s_right;
    res_.growth.push_back(g);
  }

 public:
  std::vector<SchmidtSpectrum> spectra_;
  std::vector<double> profile_, sites_s1_;

 private:
  const IntegralSet& h_;
  int n_;
  Qn target_;
  SweepConfig cfg_;
  DmrgResult& res_;
  Mpo mpo_;
  std::vector<BondSpace> bond_;
  std::vector<SiteTensor> site_;
  std::vector<Environment> lenv_, renv_;
  Theta theta_;
  bool keep_theta_ = false;
  bool warming_ = false;
  Pending pending_ = Pending::None;
  std::vector<Eigen::MatrixXd> center_;
  EnlargedSpace center_space_;
  double last_energy_ = 0.0;
};

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

DmrgResult run_dmrg(const IntegralSet& h, const Permutation& ordering, const SweepConfig& cfg, const Warmup& warmup) {
  cfg.validate();
  warmup.config.validate();
  const int n = h.norb();
  if (n < 2) throw std::invalid_argument("run_dmrg: at least two orbitals are required");
  if (ordering.size() != n || !ordering.is_valid()) throw std::invalid_argument("run_dmrg: bad ordering");
  const Qn target{cfg.n_electrons.value_or(h.meta().n_electrons), cfg.two_sz.value_or(h.meta().two_sz)};
  if (!fits(target, n)) throw std::invalid_argument("run_dmrg: infeasible target sector");

  const IntegralSet hp = apply_permutation(h, ordering);
  const Permutation inv = ordering.inverse();
  cideas::CasVector casv;
  if (warmup.casv.empty()) {
    casv = cideas::bootstrap_cas_vector(n);
  } else {
    if (static_cast<int>(warmup.casv.size()) != n) throw std::invalid_argument("run_dmrg: CAS vector length");
    for (int o : warmup.casv) casv.orbitals.push_back(inv.image.at(o));
  }
  std::vector<double> s1;
  if (!warmup.s1.empty()) {
    if (static_cast<int>(warmup.s1.size()) != n) throw std::invalid_argument("run_dmrg: entropy vector length");
    for (int a = 0; a < n; ++a) s1.push_back(warmup.s1[ordering.image[a]]);
  }

  DmrgResult res;
  res.ordering = ordering;
  Engine engine(hp, cfg, target, res);
  engine.warmup(warmup, casv, s1);
  for (int sweep = 1; sweep <= cfg.max_sweeps; ++sweep) {
    engine.sweep(sweep);
    res.sweeps = sweep;
    const std::size_t last = res.half_sweep_energy.size() - 1;
    const double de = std::abs(res.half_sweep_energy[last] - res.half_sweep_energy[last - 2]);
    const double ds = max_abs_diff(res.block_entropy[sweep], res.block_entropy[sweep - 1]);
    if (de < cfg.convergence_tol && ds < cfg.convergence_tol) {
      res.converged = true;
      break;
    }
  }
  res.energy = engine.last_energy();
  for (int c = 1; c < n; ++c) res.final_spectra.push_back(engine.spectra_[c]);
  res.state = engine.final_state();
  res.s2 = expectation(res.state, build_mpo(n, s2_terms(n)));
  return res;
}

}  // namespace qidmrg
