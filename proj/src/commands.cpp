#include "qidmrg/commands.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "qidmrg/fci.hpp"
#include "qidmrg/measure.hpp"

namespace qidmrg {

namespace fs = std::filesystem;

namespace {

constexpr double kBondThreshold = 1e-4;

fs::path prepare_output(const RunConfig& cfg) {
  fs::path out(cfg.output);
  fs::create_directories(out);
  return out;
}

std::vector<int> one_based(const std::vector<int>& v) {
  std::vector<int> r(v);
  for (int& x : r) ++x;
  return r;
}

nlohmann::json entanglement_json(const MutualInfoMatrix& info) {
  return {{"s1", info.s1},
          {"i_tot", total_correlation(info.s1)},
          {"bonds", bond_count(info, kBondThreshold)},
          {"threshold", kBondThreshold}};
}

void write_entanglement(const fs::path& out, const MutualInfoMatrix& info) {
  write_matrix_csv(out / "mutual_info.csv", info.values);
  write_text(out / "site_entropy.csv", site_entropy_csv(info, bond_count(info, kBondThreshold)));
}

Warmup warmup_for(const RunConfig& cfg, const cideas::CasVector& casv, const std::vector<double>& s1) {
  Warmup w;
  w.kind = cfg.warmup == "naive" ? WarmupKind::Naive : WarmupKind::CiDeas;
  w.config = {cfg.ci_level_cap, cfg.m_start, cfg.active_budget};
  if (cfg.warmup == "cideas") {
    w.casv = casv.orbitals;
    w.s1 = s1;
  }
  return w;
}

IrrepConstraint constraint_for(const IntegralSet& h, const RunConfig& cfg) {
  return {cfg.constrain_irreps, h.meta().irrep};
}

int count_clamped(const DmrgResult& r) {
  return static_cast<int>(std::count_if(r.truncations.begin(), r.truncations.end(), [](const auto& t) { return t.clamped; }));
}

double max_info_loss(const DmrgResult& r) {
  double m = 0.0;
  for (const auto& t : r.truncations) m = std::max(m, t.info_loss);
  return m;
}

}  // namespace

IntegralSet with_sector(const IntegralSet& h, std::optional<int> nelec, std::optional<int> two_sz) {
  if (!nelec && !two_sz) return h;
  OrbitalMeta meta = h.meta();
  if (nelec) meta.n_electrons = *nelec;
  if (two_sz) meta.two_sz = *two_sz;
  meta.hf_occupation.clear();
  return IntegralSet(std::move(meta), h.one_body_matrix(), h.two_body_table(), h.core_energy());
}

Permutation energetic_ordering(const IntegralSet& h) {
  std::vector<int> order(h.norb());
  std::iota(order.begin(), order.end(), 0);
  const auto& rank = h.meta().energy_order;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return rank[a] < rank[b]; });
  return Permutation{order};
}

MutualInfoMatrix measure_entanglement(const DmrgResult& r) {
  return mutual_information(to_original_order(measure_turning_point(r.state), r.ordering));
}

PipelineResult run_pipeline(const IntegralSet& h, const RunConfig& cfg) {
  cfg.validate();
  const int n = h.norb();
  const CostParams cost{cfg.eta};
  PipelineResult p;
  p.casv = cideas::bootstrap_cas_vector(n);
  std::vector<double> s1;
  Permutation ordering = energetic_ordering(h);

  if (cfg.ordering == "file") {
    ordering = read_ordering_file(cfg.ordering_file, n);
  } else if (cfg.ordering == "auto") {
    RunConfig explore = cfg;
    explore.chi = cfg.explore_chi;
    explore.m_min = cfg.explore_m_min;
    explore.m_start = std::min(cfg.m_start, cfg.explore_m_min);
    explore.max_sweeps = cfg.explore_sweeps;
    explore.warmup = cfg.warmup == "naive" ? "naive" : "cas-bootstrap";
    p.exploratory = run_dmrg(h, ordering, explore.sweep(), warmup_for(explore, p.casv, {}));
    const auto info = measure_entanglement(*p.exploratory);
    p.input_cost = entanglement_distance(info.values, ordering, cost);
    AnnealSchedule schedule;
    schedule.seed = cfg.seed;
    p.ordering = optimize_ordering(info.values, ordering, constraint_for(h, cfg), cost, schedule);
    ordering = p.ordering.permutation;
    p.casv = cideas::build_cas_vector(info.s1);
    s1 = info.s1;
  }
  if (cfg.ordering != "auto") {
    p.ordering = OrderingResult{};
    p.ordering.permutation = ordering;
    p.ordering.seed = cfg.seed;
  }

  p.production = run_dmrg(h, ordering, cfg.sweep(), warmup_for(cfg, p.casv, s1));
  p.info = measure_entanglement(p.production);
  // cost of the ordering actually used, on the final mutual information
  p.ordering.cost = entanglement_distance(p.info.values, ordering, cost);
  if (cfg.ordering != "auto") p.input_cost = entanglement_distance(p.info.values, energetic_ordering(h), cost);
  return p;
}

int cmd_oracle(const RunConfig& cfg, std::ostream& log) {
  const auto h = with_sector(load_integrals(cfg.input), cfg.nelec, cfg.two_sz);
  const auto& m = h.meta();
  const auto sector = fci::enumerate_sector(m.n_orbitals, m.n_electrons, m.two_sz);
  const auto gs = fci::ground_state(h, sector)[0];
  const auto info = mutual_information(oracle_rdms(gs.state));
  const auto out = prepare_output(cfg);
  nlohmann::json j = {{"command", "oracle"},
                      {"input", cfg.input},
                      {"n_orbitals", m.n_orbitals},
                      {"nelec", m.n_electrons},
                      {"two_sz", m.two_sz},
                      {"determinants", sector->size()},
                      {"energy", gs.energy},
                      {"residual", gs.residual},
                      {"s2", fci::expectation_s2(gs.state)},
                      {"i_matrix", "mutual_info.csv"}};
  j.update(entanglement_json(info));
  write_json(out / "summary.json", j);
  write_entanglement(out, info);
  log << "oracle energy " << format_double(gs.energy) << " over " << sector->size() << " determinants\n";
  return 0;
}

int cmd_run(const RunConfig& cfg, std::ostream& log) {
  cfg.validate();
  const auto h = with_sector(load_integrals(cfg.input), cfg.nelec, cfg.two_sz);
  const auto out = prepare_output(cfg);
  const auto p = run_pipeline(h, cfg);
  const auto& r = p.production;
  const CostParams cost{cfg.eta};

  write_text(out / "energy_trace.csv", energy_trace_csv(r));
  write_text(out / "steps.csv", steps_csv(r));
  write_text(out / "block_entropy.csv", block_entropy_csv(r));
  write_text(out / "truncations.csv", truncation_csv(r));
  write_entanglement(out, p.info);
  auto ord = ordering_json(p.ordering, cost);
  ord["input_cost"] = p.input_cost;
  ord["casv"] = one_based(p.casv.orbitals);
  write_json(out / "ordering.json", ord);
  write_text(out / "vectors.txt",
             format_vector_block("ORD", p.ordering.permutation.image) + "\n" + format_vector_block("CASV", p.casv.orbitals));

  nlohmann::json j = {{"command", "run"},
                      {"config", cfg.to_json()},
                      {"n_orbitals", h.norb()},
                      {"nelec", h.meta().n_electrons},
                      {"two_sz", h.meta().two_sz},
                      {"energy", r.energy},
                      {"converged", r.converged},
                      {"sweeps", r.sweeps},
                      {"half_sweep_energy", r.half_sweep_energy},
                      {"m_max", r.m_max},
                      {"s2", r.s2},
                      {"clamped_truncations", count_clamped(r)},
                      {"max_info_loss", max_info_loss(r)},
                      {"ordering", one_based(p.ordering.permutation.image)},
                      {"ordering_cost", p.ordering.cost},
                      {"casv", one_based(p.casv.orbitals)}};
  j.update(entanglement_json(p.info));
  if (p.exploratory) {
    j["exploratory"] = {{"energy", p.exploratory->energy},
                        {"sweeps", p.exploratory->sweeps},
                        {"m_max", p.exploratory->m_max},
                        {"input_cost", p.input_cost}};
  }
  write_json(out / "summary.json", j);
  write_json(out / "checkpoint.json", checkpoint_to_json({cfg.to_json(), r.ordering, r.energy, r.state}));

  log << "energy " << format_double(r.energy) << " after " << r.sweeps << " sweeps, M_max " << r.m_max << "\n";
  if (!r.converged) {
    log << "not converged within " << cfg.max_sweeps << " sweeps; last half-sweep energies";
    for (std::size_t k = r.half_sweep_energy.size() >= 3 ? r.half_sweep_energy.size() - 3 : 0;
         k < r.half_sweep_energy.size(); ++k)
      log << ' ' << format_double(r.half_sweep_energy[k]);
    log << "\n";
    return 2;
  }
  return 0;
}

int cmd_order(const RunConfig& cfg, const OrderOptions& opts, std::ostream& log) {
  const CostParams cost{cfg.eta};
  cost.validate();
  const Eigen::MatrixXd info = read_matrix_csv(opts.matrix);
  const int n = static_cast<int>(info.rows());
  for (const auto& m : opts.methods)
    if (m == "brute" && n > kBruteForceCap)
      throw std::invalid_argument("brute force is limited to " + std::to_string(kBruteForceCap) + " orbitals, got " +
                                  std::to_string(n));
  IrrepConstraint constraint;
  if (!opts.labels.empty()) {
    if (static_cast<int>(opts.labels.size()) != n) throw std::invalid_argument("irrep labels do not match the matrix");
    constraint = {cfg.constrain_irreps, opts.labels};
  }

  const auto out = prepare_output(cfg);
  const Permutation start = Permutation::identity(n);
  nlohmann::json results = nlohmann::json::array();
  std::string table = "method,cost\ninput," + format_double(entanglement_distance(info, start, cost)) + "\n";
  for (const auto& m : opts.methods) {
    OrderingResult r;
    if (m == "anneal") {
      AnnealSchedule s;
      s.seed = cfg.seed;
      r = optimize_ordering(info, start, constraint, cost, s);
    } else if (m == "fiedler") {
      r = fiedler_ordering(info, cost);
    } else if (m == "brute") {
      r = brute_force_ordering(info, cost);
    } else {
      throw std::invalid_argument("unknown ordering method '" + m + "'");
    }
    results.push_back(ordering_json(r, cost));
    table += m + "," + format_double(r.cost) + "\n";
    log << m << " cost " << format_double(r.cost) << "\n";
  }
  write_json(out / "ordering.json", {{"command", "order"}, {"matrix", opts.matrix}, {"eta", cfg.eta}, {"results", results}});
  write_text(out / "ordering_costs.csv", table);
  return 0;
}

int cmd_analyze(const RunConfig& cfg, const std::string& checkpoint, std::ostream& log) {
  std::ifstream in(checkpoint);
  if (!in) throw std::runtime_error("cannot open checkpoint '" + checkpoint + "'");
  const auto c = checkpoint_from_json(nlohmann::json::parse(in));
  const auto info = mutual_information(to_original_order(measure_turning_point(c.state), c.ordering));
  const auto spectra = cut_spectra(c.state);
  std::vector<double> block;
  for (const auto& w : spectra) block.push_back(von_neumann(w));
  block.front() = block.back() = 0.0;

  const auto out = prepare_output(cfg);
  write_entanglement(out, info);
  std::string csv = "l,entropy\n";
  for (std::size_t l = 0; l < block.size(); ++l) csv += std::to_string(l) + "," + format_double(block[l]) + "\n";
  write_text(out / "block_entropy.csv", csv);
  const CostParams cost{cfg.eta};
  nlohmann::json j = {{"command", "analyze"},
                      {"checkpoint", checkpoint},
                      {"config", c.config},
                      {"energy", c.energy},
                      {"ordering", one_based(c.ordering.image)},
                      {"ordering_cost", entanglement_distance(info.values, c.ordering, cost)},
                      {"eta", cfg.eta},
                      {"block_entropy", block}};
  j.update(entanglement_json(info));
  write_json(out / "summary.json", j);
  log << "I_tot " << format_double(total_correlation(info.s1)) << "\n";
  return 0;
}

}  // namespace qidmrg
