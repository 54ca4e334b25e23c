#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace atomion {

using LinearMap = std::function<void(std::span<const double>, std::span<double>)>;
using Projector = std::function<void(std::span<double>)>;

struct LobpcgOptions {
  std::size_t nev = 1;          ///< number of wanted eigenpairs (lowest)
  double tolerance = 1e-8;      ///< on ||A x - theta x|| for unit x
  std::size_t max_iterations = 2000;
  bool project_inside_loop = true;
};

struct LobpcgResult {
  std::vector<double> values;        ///< ascending, size = block size
  Eigen::MatrixXd vectors;           ///< orthonormal columns
  std::vector<double> residuals;     ///< per column, from a fresh operator application
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<double> history;       ///< max residual over the wanted pairs, per iteration
};

/// Locally optimal block preconditioned conjugate gradient for the lowest
/// eigenpairs of a symmetric operator.
///
/// `initial` fixes the block size; its columns need not be orthonormal but
/// must be independent after projection. `precondition` must be symmetric
/// positive definite. `project` (may be empty) maps onto an invariant subspace
/// of the operator and is applied to the initial block and to every search
/// direction.
LobpcgResult lobpcg(const LinearMap& apply, const LinearMap& precondition, const Projector& project,
                    Eigen::MatrixXd initial, const LobpcgOptions& options);

}  // namespace atomion
