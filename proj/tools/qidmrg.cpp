// Command-line front end: oracle, run, order, analyze.

#include <Eigen/Core>
#include <cstdlib>
#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "qidmrg/commands.hpp"

namespace {

using qidmrg::RunConfig;

std::string flag_name(std::string key) {
  for (char& c : key)
    if (c == '_') c = '-';
  return "--" + key;
}

const std::map<std::string, std::string> kHelp = {
    {"nelec", "electron count (overrides the file)"},
    {"two_sz", "2*S_z of the target sector"},
    {"chi", "discarded-weight bound for DBSS truncation"},
    {"m_min", "minimum kept states"},
    {"m_start", "kept states during the warm-up"},
    {"m_cap", "maximum kept states"},
    {"max_sweeps", "sweep limit after the warm-up"},
    {"convergence_tol", "energy and entropy-profile tolerance"},
    {"solver_tol", "Davidson residual tolerance"},
    {"eta", "exponent of the ordering distance"},
    {"ordering", "energetic, file or auto"},
    {"ordering_file", "ORD block or plain 1-based list"},
    {"warmup", "cideas, cas-bootstrap or naive"},
    {"ci_level_cap", "highest excitation rank in warm-up environments"},
    {"active_budget", "active orbitals used by the warm-up"},
    {"constrain_irreps", "keep irreps in contiguous blocks (true/false)"},
    {"explore_chi", "chi of the exploratory run (ordering=auto)"},
    {"explore_m_min", "m_min of the exploratory run"},
    {"explore_sweeps", "sweeps of the exploratory run"},
    {"seed", "annealing seed"},
    {"output", "report directory"},
    {"threads", "Eigen threads (also QIDMRG_THREADS)"},
};

struct Settings {
  std::string config_file;
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;

  void attach(CLI::App* app) {
    app->add_option("--config", config_file, "key = value settings file")->check(CLI::ExistingFile);
    for (const auto& key : RunConfig::keys()) {
      if (key == "input") {
        options[key] = app->add_option("input,--input", values[key], "FCIDUMP or JSON integral file");
        continue;
      }
      const auto help = kHelp.find(key);
      options[key] = app->add_option(flag_name(key), values[key], help == kHelp.end() ? "" : help->second);
    }
  }

  // defaults < environment < file < command line
  RunConfig resolve() const {
    RunConfig cfg;
    if (const char* env = std::getenv("QIDMRG_THREADS")) cfg.set("threads", env);
    if (!config_file.empty()) qidmrg::apply_config_file(cfg, config_file);
    for (const auto& [key, opt] : options)
      if (opt->count() > 0) cfg.set(key, values.at(key));
    return cfg;
  }
};

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-site DMRG for quantum chemistry with entanglement-based ordering"};
  app.require_subcommand(1);

  Settings oracle_s, run_s, order_s, analyze_s;
  auto* oracle = app.add_subcommand("oracle", "exact ground state, energies and entropies");
  oracle_s.attach(oracle);
  auto* run = app.add_subcommand("run", "DMRG calculation, optionally with ordering=auto");
  run_s.attach(run);
  auto* order = app.add_subcommand("order", "orbital ordering from a mutual information matrix");
  order_s.attach(order);
  std::string matrix, methods = "anneal,fiedler,brute", labels;
  order->add_option("--matrix", matrix, "CSV mutual information matrix")->required();
  order->add_option("--methods", methods, "comma-separated subset of anneal,fiedler,brute");
  order->add_option("--labels", labels, "comma-separated irrep label per orbital");
  auto* analyze = app.add_subcommand("analyze", "recompute entropy reports from a checkpoint");
  analyze_s.attach(analyze);
  std::string checkpoint;
  analyze->add_option("--checkpoint", checkpoint, "checkpoint.json written by run")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    const Settings& s = *oracle ? oracle_s : *run ? run_s : *order ? order_s : analyze_s;
    const RunConfig cfg = s.resolve();
    Eigen::setNbThreads(cfg.threads);
    if (*oracle || *run) {
      if (cfg.input.empty()) throw std::invalid_argument("no input file given");
      return *oracle ? qidmrg::cmd_oracle(cfg, std::cout) : qidmrg::cmd_run(cfg, std::cerr);
    }
    if (*order) {
      qidmrg::OrderOptions opts;
      opts.matrix = matrix;
      opts.methods = split(methods);
      for (const auto& l : split(labels)) opts.labels.push_back(std::stoi(l));
      return qidmrg::cmd_order(cfg, opts, std::cout);
    }
    return qidmrg::cmd_analyze(cfg, checkpoint, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "qidmrg: error: " << e.what() << "\n";
    return 1;
  }
}
