#pragma once

#include <array>
#include <vector>

#include <Eigen/Core>

#include "pathnnt/stack.hpp"
#include "pathnnt/types.hpp"

namespace pathnnt {

/// Sandwich covariance of the stacked estimator.
///
/// Coordinates whose index estimate is infinite are excluded from the
/// system; their rows and columns are zero in the matrices below and their
/// standard errors are NaN, with infinite_index flagging which ones.
struct SandwichResult {
  Eigen::MatrixXd bread;       // minus the mean Jacobian of the stack
  Eigen::MatrixXd meat;        // mean outer product of the stack
  Eigen::MatrixXd covariance;  // bread^-1 meat bread^-T / n, symmetrized
  Eigen::VectorXd standard_errors;
  bool singular = false;
  double condition_estimate = 0.0;
  std::array<bool, 9> infinite_index{};
  std::vector<int> active;  // coordinates participating in the solve
};

/// One confidence interval. infinite marks the degenerate-index case where
/// no interval exists.
struct Interval {
  double lower = 0.0;
  double upper = 0.0;
  bool infinite = false;
};

/// Covariance assembly step: bread^-1 meat bread^-T / n via a
/// rank-revealing solve, symmetrized. Throws SingularBread when the
/// bread's condition estimate exceeds 1e12.
Eigen::MatrixXd sandwich_combine(const Eigen::MatrixXd& bread, const Eigen::MatrixXd& meat,
                                 std::size_t n);

/// Computes the sandwich covariance at a solved parameter vector.
///
/// The bread uses closed-form derivatives for the regression-score rows and
/// the index rows (d g/d p = -1/p^2) and centered finite differences with
/// step max(1e-6, 1e-6 |theta_k|) for the contrast, mediator-mean and
/// effect rows. singular is set when the bread's condition estimate
/// exceeds 1e12; the covariance is not usable in that case.
SandwichResult sandwich(const Dataset& data, const ParameterVector& theta,
                        LinkFamily family);

/// Wald intervals at the given level for all 32 coordinates. Index
/// coordinates get their lower bound floored at 1; infinite indices get the
/// infinite marker.
std::array<Interval, layout::kDim> confidence_intervals(const SandwichResult& result,
                                                        const ParameterVector& theta,
                                                        double level = 0.95);

}  // namespace pathnnt
