#include "pathnnt/stack.hpp"

#include <cmath>
#include <limits>

#include "pathnnt/accumulate.hpp"
#include "pathnnt/effects.hpp"
#include "pathnnt/errors.hpp"
#include "pathnnt/glm.hpp"

namespace pathnnt {

namespace {

double g_residual(double effect, const ExtendedIndex& index) {
  if (index.is_infinite()) {
    return 0.0;  // equation excluded from the system
  }
  if (effect <= 0.0) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return 1.0 / effect - index.value();
}

}  // namespace

StackVec q_function(const ObservationRecord& record, const ParameterVector& theta,
                    LinkFamily family) {
  StackVec q = StackVec::Zero();

  const GlmSpec outcome_spec = GlmSpec::outcome_model(family);
  const GlmSpec mediator_spec = GlmSpec::mediator_model(family);
  SmallVec beta(4), gamma(3);
  for (int k = 0; k < 4; ++k) beta[k] = theta.beta[k];
  for (int k = 0; k < 3; ++k) gamma[k] = theta.gamma[k];
  q.segment<4>(StackLayout::kScoreOffset) = score(outcome_spec, beta, record);
  q.segment<3>(StackLayout::kScoreOffset + 4) = score(mediator_spec, gamma, record);

  const double l = record.confounder;
  const double gate0 = record.exposure == 0 ? 1.0 : 0.0;
  const double gate1 = 1.0 - gate0;

  const double xi00 = outcome_mean(theta.beta, 0.0, 0.0, l, family);
  const double xi01 = outcome_mean(theta.beta, 0.0, 1.0, l, family);
  const double xi10 = outcome_mean(theta.beta, 1.0, 0.0, l, family);
  const double xi11 = outcome_mean(theta.beta, 1.0, 1.0, l, family);
  const double eta0 = mediator_mean(theta.gamma, 0.0, l, family);
  const double eta1 = mediator_mean(theta.gamma, 1.0, l, family);

  const auto& oc = theta.outcome_contrasts;
  q[StackLayout::kOutcomeContrastOffset + 0] = (xi10 - xi00 - oc[0]) * gate0;
  q[StackLayout::kOutcomeContrastOffset + 1] = (xi10 - xi00 - oc[1]) * gate1;
  q[StackLayout::kOutcomeContrastOffset + 2] = (xi01 - xi00 - oc[2]) * gate0;
  q[StackLayout::kOutcomeContrastOffset + 3] = (xi01 - xi00 - oc[3]) * gate1;
  q[StackLayout::kOutcomeContrastOffset + 4] = (xi11 - xi01 - oc[4]) * gate0;
  q[StackLayout::kOutcomeContrastOffset + 5] = (xi11 - xi01 - oc[5]) * gate1;

  const auto& mm = theta.mediator_means;
  q[StackLayout::kMediatorMeanOffset + 0] = (eta1 - mm[0]) * gate0;
  q[StackLayout::kMediatorMeanOffset + 1] = (eta1 - mm[1]) * gate1;
  q[StackLayout::kMediatorMeanOffset + 2] = (eta0 - mm[2]) * gate0;
  q[StackLayout::kMediatorMeanOffset + 3] = (eta0 - mm[3]) * gate1;

  // Effect parameters against the values implied by the mean parameters:
  // indirect = (mediator contrast) * (controlled outcome contrast),
  // direct   = contrasts at mediator levels weighted by the exposed-
  //            mediator mean.
  const auto& pi = theta.p_indirect;
  const auto& pd = theta.p_direct;
  q[StackLayout::kIndirectOffset + 0] = (pi[0] - (mm[0] - mm[2]) * oc[2]) * gate0;
  q[StackLayout::kIndirectOffset + 1] = (pi[1] - (mm[1] - mm[3]) * oc[3]) * gate1;
  q[StackLayout::kIndirectOffset + 2] = pi[0] * gate0 + pi[1] * gate1 - pi[2];
  q[StackLayout::kDirectOffset + 0] =
      (pd[0] - (oc[0] * (1.0 - mm[0]) + oc[4] * mm[0])) * gate0;
  q[StackLayout::kDirectOffset + 1] =
      (pd[1] - (oc[1] * (1.0 - mm[1]) + oc[5] * mm[1])) * gate1;
  q[StackLayout::kDirectOffset + 2] = pd[0] * gate0 + pd[1] * gate1 - pd[2];

  q[StackLayout::kIndexOffset + 0] = g_residual(pi[0], theta.indices[0]);
  q[StackLayout::kIndexOffset + 1] = g_residual(pi[1], theta.indices[1]);
  q[StackLayout::kIndexOffset + 2] = g_residual(pi[2], theta.indices[2]);
  q[StackLayout::kIndexOffset + 3] = g_residual(pd[0], theta.indices[3]);
  q[StackLayout::kIndexOffset + 4] = g_residual(pd[1], theta.indices[4]);
  q[StackLayout::kIndexOffset + 5] = g_residual(pd[2], theta.indices[5]);
  q[StackLayout::kIndexOffset + 6] = g_residual(pi[0] + pd[0], theta.indices[6]);
  q[StackLayout::kIndexOffset + 7] = g_residual(pi[1] + pd[1], theta.indices[7]);
  q[StackLayout::kIndexOffset + 8] = g_residual(pi[2] + pd[2], theta.indices[8]);
  return q;
}

StackVec stacked_residual(const Dataset& data, const ParameterVector& theta,
                          LinkFamily family) {
  return pairwise_sum(std::size_t{0}, data.size(), StackVec(StackVec::Zero()),
                      [&](std::size_t i) -> StackVec {
                        return q_function(data.canonical(i), theta, family);
                      });
}

ParameterVector solve(const Dataset& data, LinkFamily family) {
  if (data.n0() == 0 || data.n1() == 0) {
    throw EmptyGroup("estimation requires observations in both exposure groups");
  }

  const GlmFit outcome_fit = fit(GlmSpec::outcome_model(family), data);
  if (!outcome_fit.converged) {
    throw DidNotConverge("conditional outcome model did not converge",
                         outcome_fit.iterations, outcome_fit.max_score_norm);
  }
  const GlmFit mediator_fit = fit(GlmSpec::mediator_model(family), data);
  if (!mediator_fit.converged) {
    throw DidNotConverge("mediator model did not converge", mediator_fit.iterations,
                         mediator_fit.max_score_norm);
  }

  ParameterVector theta;
  for (int k = 0; k < 4; ++k) theta.beta[k] = outcome_fit.coefficients[k];
  for (int k = 0; k < 3; ++k) theta.gamma[k] = mediator_fit.coefficients[k];

  // Groupwise means of the fitted contrasts. Gated sums over the canonical
  // order keep the reduction identical to the one stacked_residual checks.
  struct GroupSums {
    Eigen::Matrix<double, 5, 1> v = Eigen::Matrix<double, 5, 1>::Zero();
    GroupSums& operator+=(const GroupSums& o) {
      v += o.v;
      return *this;
    }
  };
  for (int a = 0; a < 2; ++a) {
    GroupSums sums = pairwise_sum(
        std::size_t{0}, data.size(), GroupSums{}, [&](std::size_t i) {
          const ObservationRecord& r = data.canonical(i);
          GroupSums g;
          if (r.exposure != a) return g;
          const double l = r.confounder;
          const double xi00 = outcome_mean(theta.beta, 0.0, 0.0, l, family);
          g.v[0] = outcome_mean(theta.beta, 1.0, 0.0, l, family) - xi00;
          g.v[1] = outcome_mean(theta.beta, 0.0, 1.0, l, family) - xi00;
          g.v[2] = outcome_mean(theta.beta, 1.0, 1.0, l, family) -
                   outcome_mean(theta.beta, 0.0, 1.0, l, family);
          g.v[3] = mediator_mean(theta.gamma, 1.0, l, family);
          g.v[4] = mediator_mean(theta.gamma, 0.0, l, family);
          return g;
        });
    const double n_a = static_cast<double>(data.group_size(a));
    theta.outcome_contrasts[0 + a] = sums.v[0] / n_a;
    theta.outcome_contrasts[2 + a] = sums.v[1] / n_a;
    theta.outcome_contrasts[4 + a] = sums.v[2] / n_a;
    theta.mediator_means[0 + a] = sums.v[3] / n_a;
    theta.mediator_means[2 + a] = sums.v[4] / n_a;
  }

  for (int a = 0; a < 2; ++a) {
    theta.p_indirect[a] = indirect_effect(a, theta.beta, theta.gamma, family, data);
    theta.p_direct[a] = direct_effect(a, theta.beta, theta.gamma, family, data);
  }
  theta.p_indirect[2] =
      marginalize(theta.p_indirect[0], theta.p_indirect[1], data.n0(), data.n1());
  theta.p_direct[2] =
      marginalize(theta.p_direct[0], theta.p_direct[1], data.n0(), data.n1());

  for (int k = 0; k < 3; ++k) {
    theta.indices[0 + k] = g_transform(theta.p_indirect[k]);
    theta.indices[3 + k] = g_transform(theta.p_direct[k]);
    theta.indices[6 + k] = g_transform(theta.p_indirect[k] + theta.p_direct[k]);
  }
  return theta;
}

}  // namespace pathnnt
