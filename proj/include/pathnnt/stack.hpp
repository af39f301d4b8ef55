#pragma once

#include <Eigen/Core>

#include "pathnnt/links.hpp"
#include "pathnnt/types.hpp"

namespace pathnnt {

using StackVec = Eigen::Matrix<double, layout::kDim, 1>;

/// Block structure of the stacked estimating system. Offsets mirror the
/// flat ParameterVector layout exactly.
struct StackLayout {
  static constexpr int kScoreOffset = 0;  // 4 outcome-model + 3 mediator-model scores
  static constexpr int kScoreSize = 7;
  static constexpr int kOutcomeContrastOffset = layout::kOutcomeContrast;
  static constexpr int kOutcomeContrastSize = 6;
  static constexpr int kMediatorMeanOffset = layout::kMediatorMean;
  static constexpr int kMediatorMeanSize = 4;
  static constexpr int kIndirectOffset = layout::kIndirect;
  static constexpr int kIndirectSize = 3;
  static constexpr int kDirectOffset = layout::kDirect;
  static constexpr int kDirectSize = 3;
  static constexpr int kIndexOffset = layout::kIndex;
  static constexpr int kIndexSize = 9;
  static constexpr int kDim = layout::kDim;
};

/// Per-record contribution to the stacked estimating system.
///
/// Blocks, in order:
///  - the two regression scores;
///  - controlled outcome contrasts minus their groupwise mean parameters,
///    gated by group membership;
///  - mediator-model means minus their groupwise mean parameters, gated;
///  - indirect/direct effect parameters minus the values implied by the
///    contrast and mediator-mean parameters, gated; plus the marginal
///    residuals under observed-share weighting;
///  - index parameters minus the g-transform of their effect parameters
///    (total-effect rows transform the indirect+direct sum, which keeps the
///    total effects out of the parameter list).
///
/// Rows whose index parameter is infinite evaluate to exact zero: those
/// equations are excluded from the system. A finite index paired with a
/// non-positive effect yields NaN, which root-finding callers treat as an
/// inadmissible point.
StackVec q_function(const ObservationRecord& record, const ParameterVector& theta,
                    LinkFamily family);

/// Sum of q_function over the dataset (fixed pairwise reduction).
StackVec stacked_residual(const Dataset& data, const ParameterVector& theta,
                          LinkFamily family);

/// Solves the stacked system by sequential plug-in: fit the two
/// regressions, take groupwise means of the fitted contrasts, assemble the
/// effects and weighted marginals, then apply the index transform. The
/// result zeroes every equation whose index value is finite.
///
/// Throws EmptyGroup, RankDeficientDesign or DidNotConverge.
ParameterVector solve(const Dataset& data, LinkFamily family);

}  // namespace pathnnt
