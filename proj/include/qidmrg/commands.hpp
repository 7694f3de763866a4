#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "qidmrg/reports.hpp"

namespace qidmrg {

/// Integrals with the electron count and spin replaced, reference
/// occupations rebuilt by aufbau. Unset values keep the file's sector.
IntegralSet with_sector(const IntegralSet& h, std::optional<int> nelec, std::optional<int> two_sz);

/// Orbitals ordered by their energetic rank.
Permutation energetic_ordering(const IntegralSet& h);

/// Entropies and mutual information of a converged chain, original indices.
MutualInfoMatrix measure_entanglement(const DmrgResult& r);

struct PipelineResult {
  std::optional<DmrgResult> exploratory;
  OrderingResult ordering;          // ordering used by the production run
  double input_cost = 0.0;          // cost of the energetic ordering, exploratory I
  cideas::CasVector casv;
  DmrgResult production;
  MutualInfoMatrix info;            // from the production run
};

/// ordering=auto runs a short exploratory calculation on the energetic
/// ordering with the bootstrap CAS vector, anneals the ordering on its mutual
/// information and builds the CAS vector from its entropies, then runs the
/// production calculation. Other orderings go straight to production.
PipelineResult run_pipeline(const IntegralSet& h, const RunConfig& cfg);

/// Each command writes its reports into cfg.output and returns the exit code.
int cmd_oracle(const RunConfig& cfg, std::ostream& log);
int cmd_run(const RunConfig& cfg, std::ostream& log);

struct OrderOptions {
  std::string matrix;  // CSV mutual information
  std::vector<std::string> methods{"anneal", "fiedler", "brute"};
  std::vector<int> labels;  // irrep labels for the constraint, optional
};
int cmd_order(const RunConfig& cfg, const OrderOptions& opts, std::ostream& log);

/// Recomputes entropy reports from a checkpoint.
int cmd_analyze(const RunConfig& cfg, const std::string& checkpoint, std::ostream& log);

}  // namespace qidmrg
