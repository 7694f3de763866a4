#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "qidmrg/cideas.hpp"
#include "qidmrg/dmrg.hpp"
#include "qidmrg/entanglement.hpp"
#include "qidmrg/ordering.hpp"

namespace qidmrg {

/// Everything a command needs; text keys match the config-file keys.
struct RunConfig {
  std::string input;
  std::optional<int> nelec;
  std::optional<int> two_sz;
  double chi = 1e-6;
  int m_min = 64;
  int m_start = 64;
  int m_cap = 4096;
  int max_sweeps = 8;
  double convergence_tol = 1e-8;
  double solver_tol = 1e-9;
  double eta = 2.0;
  std::string ordering = "energetic";  // energetic | file | auto
  std::string ordering_file;
  std::string warmup = "cideas";  // cideas | cas-bootstrap | naive
  int ci_level_cap = 3;
  int active_budget = 7;
  bool constrain_irreps = true;
  // exploratory stage of ordering=auto
  double explore_chi = 1e-4;
  int explore_m_min = 16;
  int explore_sweeps = 2;
  std::uint64_t seed = 20121;
  std::string output = ".";
  int threads = 1;

  /// Throws std::invalid_argument for an unknown key or a malformed value.
  void set(const std::string& key, const std::string& value);
  void validate() const;
  SweepConfig sweep() const;
  nlohmann::json to_json() const;

  static std::vector<std::string> keys();
};

/// Reads `key = value` lines; `#` starts a comment. Errors carry the line.
void apply_config_file(RunConfig& cfg, const std::string& path);

/// ORD / CASV vectors in the bracketed layout, 1-based, 15 per line.
std::string format_vector_block(const std::string& key, const std::vector<int>& zero_based);
/// Reads an ordering file: either the bracketed ORD layout or a plain list
/// of 1-based indices.
Permutation read_ordering_file(const std::string& path, int n);

/// Square CSV matrix without a header.
void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix_csv(const std::string& path);

void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

std::string energy_trace_csv(const DmrgResult& r);
std::string steps_csv(const DmrgResult& r);
std::string block_entropy_csv(const DmrgResult& r);
std::string truncation_csv(const DmrgResult& r);
std::string site_entropy_csv(const MutualInfoMatrix& info, const std::vector<int>& bonds);

nlohmann::json ordering_json(const OrderingResult& r, const CostParams& params);

/// Versioned JSON snapshot of a converged chain plus what produced it.
struct Checkpoint {
  static constexpr int kVersion = 1;
  nlohmann::json config;
  Permutation ordering;
  double energy = 0.0;
  Mps state;
};

nlohmann::json checkpoint_to_json(const Checkpoint& c);
/// Throws std::runtime_error on a wrong format tag or version.
Checkpoint checkpoint_from_json(const nlohmann::json& j);

}  // namespace qidmrg
