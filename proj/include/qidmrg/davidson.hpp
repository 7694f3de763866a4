#pragma once

#include <Eigen/Dense>
#include <functional>
#include <stdexcept>
#include <vector>

namespace qidmrg {

struct DavidsonOptions {
  int n_roots = 1;
  double tolerance = 1e-9;  // residual 2-norm per root
  int max_iterations = 2000;
  int max_subspace = 48;
};

struct DavidsonResult {
  std::vector<double> values;
  Eigen::MatrixXd vectors;  // one column per root
  std::vector<double> residuals;
  int iterations = 0;
  bool converged = false;
};

class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using MatVec = std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>;

/// Block Davidson for the lowest eigenpairs of a real symmetric operator,
/// preconditioned by its diagonal. Missing guess columns are filled with unit
/// vectors on the lowest diagonal entries, so a run is fully deterministic.
/// Throws ConvergenceError when the iteration cap is hit.
DavidsonResult davidson(const MatVec& apply, const Eigen::VectorXd& diagonal, const Eigen::MatrixXd& guess,
                        const DavidsonOptions& opts);

}  // namespace qidmrg
