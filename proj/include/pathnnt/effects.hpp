#pragma once

#include <array>
#include <optional>

#include "pathnnt/links.hpp"
#include "pathnnt/types.hpp"

namespace pathnnt {

/// Fitted mean of the mediator model at exposure a and confounder l.
double mediator_mean(const std::array<double, 3>& gamma, double a, double l,
                     LinkFamily family);

/// Fitted mean of the conditional outcome model at (a, m, l).
double outcome_mean(const std::array<double, 4>& beta, double a, double m, double l,
                    LinkFamily family);

/// All effect probabilities on the benefit scale. Totals are evaluated as
/// direct plus indirect, so the additive decomposition holds exactly; the
/// indices are always re-derived through g_transform.
struct EffectSet {
  std::array<double, 2> p_indirect_group{};  // a = 0, 1
  std::array<double, 2> p_direct_group{};
  double p_indirect_marginal = 0.0;
  double p_direct_marginal = 0.0;

  double p_total_group(int a) const { return p_direct_group[a] + p_indirect_group[a]; }
  double p_total_marginal() const { return p_direct_marginal + p_indirect_marginal; }

  double effect_for(IndexId id) const;

  /// The nine indices in flat-vector order.
  std::array<ExtendedIndex, 9> indices() const;
};

/// Groupwise natural indirect effect: the product of the group-a mean
/// mediator contrast and the group-a mean controlled outcome contrast
/// (a product of two averaged contrasts, not an average of products).
/// Throws EmptyGroup.
double indirect_effect(int group, const std::array<double, 4>& beta,
                       const std::array<double, 3>& gamma, LinkFamily family,
                       const Dataset& data);

/// Groupwise natural direct effect: controlled contrasts at mediator levels
/// 0 and 1 weighted by the group-a mean of the exposed-mediator model.
/// Throws EmptyGroup.
double direct_effect(int group, const std::array<double, 4>& beta,
                     const std::array<double, 3>& gamma, LinkFamily family,
                     const Dataset& data);

/// direct_effect + indirect_effect for the group.
double total_effect(int group, const std::array<double, 4>& beta,
                    const std::array<double, 3>& gamma, LinkFamily family,
                    const Dataset& data);

/// Observed-share weighted mean of the two groupwise effects.
double marginalize(double effect0, double effect1, std::size_t n0, std::size_t n1);

/// Controlled direct effect with the mediator held at m: the mean of
/// xi(1, m, L) - xi(0, m, L) over the group (or over everyone when group
/// is empty). Its g_transform is the mediator-adjusted index.
double controlled_direct_effect(int m, std::optional<int> group,
                                const std::array<double, 4>& beta, LinkFamily family,
                                const Dataset& data);

/// Full effect set from fitted coefficients and the empirical confounder
/// distribution. Throws EmptyGroup.
EffectSet compute_effects(const std::array<double, 4>& beta,
                          const std::array<double, 3>& gamma, LinkFamily family,
                          const Dataset& data);

/// No-covariate closed form: builds the effect set directly from groupwise
/// direct effects, mediator contrasts, controlled outcome contrasts and the
/// exposed share, with no data involved.
EffectSet closed_form_effects(double p_direct0, double p_direct1, double mediator_contrast0,
                              double mediator_contrast1, double outcome_contrast0,
                              double outcome_contrast1, double exposed_share);

/// Built-in demonstration scenario (education -> foreign language ->
/// emigration) used by the CLI `example` command.
EffectSet example_scenario();

}  // namespace pathnnt
