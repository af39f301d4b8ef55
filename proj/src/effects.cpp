#include "pathnnt/effects.hpp"

#include <cstddef>

#include "pathnnt/accumulate.hpp"
#include "pathnnt/errors.hpp"

namespace pathnnt {

namespace {

// Mean of f(record) over the records with exposure == group, walking the
// canonical order. Out-of-group records contribute exact zeros, so the
// reduction tree is shared by every group mean on the same dataset.
template <class F>
double group_mean(const Dataset& data, int group, F&& f) {
  const std::size_t n_group = data.group_size(group);
  if (n_group == 0) {
    throw EmptyGroup("no records in the requested exposure group");
  }
  const double total = pairwise_sum_d(data.size(), [&](std::size_t i) {
    const ObservationRecord& r = data.canonical(i);
    return r.exposure == group ? f(r) : 0.0;
  });
  return total / static_cast<double>(n_group);
}

}  // namespace

double mediator_mean(const std::array<double, 3>& gamma, double a, double l,
                     LinkFamily family) {
  return inv_link(family, gamma[0] + gamma[1] * a + gamma[2] * l);
}

double outcome_mean(const std::array<double, 4>& beta, double a, double m, double l,
                    LinkFamily family) {
  return inv_link(family, beta[0] + beta[1] * a + beta[2] * m + beta[3] * l);
}

double EffectSet::effect_for(IndexId id) const {
  switch (id) {
    case IndexId::kInne: return p_indirect_group[0];
    case IndexId::kIein: return p_indirect_group[1];
    case IndexId::kInnt: return p_indirect_marginal;
    case IndexId::kDnne: return p_direct_group[0];
    case IndexId::kDein: return p_direct_group[1];
    case IndexId::kDnnt: return p_direct_marginal;
    case IndexId::kNne: return p_total_group(0);
    case IndexId::kEin: return p_total_group(1);
    case IndexId::kNnt: return p_total_marginal();
  }
  return 0.0;
}

std::array<ExtendedIndex, 9> EffectSet::indices() const {
  std::array<ExtendedIndex, 9> out;
  for (int k = 0; k < 9; ++k) {
    out[k] = g_transform(effect_for(static_cast<IndexId>(k)));
  }
  return out;
}

double indirect_effect(int group, const std::array<double, 4>& beta,
                       const std::array<double, 3>& gamma, LinkFamily family,
                       const Dataset& data) {
  const double mediator_contrast = group_mean(data, group, [&](const ObservationRecord& r) {
    return mediator_mean(gamma, 1.0, r.confounder, family) -
           mediator_mean(gamma, 0.0, r.confounder, family);
  });
  const double outcome_contrast = group_mean(data, group, [&](const ObservationRecord& r) {
    return outcome_mean(beta, 0.0, 1.0, r.confounder, family) -
           outcome_mean(beta, 0.0, 0.0, r.confounder, family);
  });
  return mediator_contrast * outcome_contrast;
}

double direct_effect(int group, const std::array<double, 4>& beta,
                     const std::array<double, 3>& gamma, LinkFamily family,
                     const Dataset& data) {
  const double contrast_m0 = group_mean(data, group, [&](const ObservationRecord& r) {
    return outcome_mean(beta, 1.0, 0.0, r.confounder, family) -
           outcome_mean(beta, 0.0, 0.0, r.confounder, family);
  });
  const double contrast_m1 = group_mean(data, group, [&](const ObservationRecord& r) {
    return outcome_mean(beta, 1.0, 1.0, r.confounder, family) -
           outcome_mean(beta, 0.0, 1.0, r.confounder, family);
  });
  const double exposed_mediator = group_mean(data, group, [&](const ObservationRecord& r) {
    return mediator_mean(gamma, 1.0, r.confounder, family);
  });
  return contrast_m0 * (1.0 - exposed_mediator) + contrast_m1 * exposed_mediator;
}

double total_effect(int group, const std::array<double, 4>& beta,
                    const std::array<double, 3>& gamma, LinkFamily family,
                    const Dataset& data) {
  return direct_effect(group, beta, gamma, family, data) +
         indirect_effect(group, beta, gamma, family, data);
}

double marginalize(double effect0, double effect1, std::size_t n0, std::size_t n1) {
  if (n0 == 0 || n1 == 0) {
    throw EmptyGroup("marginal effects need both exposure groups");
  }
  const double n = static_cast<double>(n0 + n1);
  return (static_cast<double>(n0) * effect0 + static_cast<double>(n1) * effect1) / n;
}

double controlled_direct_effect(int m, std::optional<int> group,
                                const std::array<double, 4>& beta, LinkFamily family,
                                const Dataset& data) {
  auto contrast = [&](const ObservationRecord& r) {
    return outcome_mean(beta, 1.0, m, r.confounder, family) -
           outcome_mean(beta, 0.0, m, r.confounder, family);
  };
  if (group.has_value()) {
    return group_mean(data, *group, contrast);
  }
  if (data.size() == 0) {
    throw EmptyGroup("controlled direct effect needs at least one record");
  }
  const double total = pairwise_sum_d(
      data.size(), [&](std::size_t i) { return contrast(data.canonical(i)); });
  return total / static_cast<double>(data.size());
}

EffectSet compute_effects(const std::array<double, 4>& beta,
                          const std::array<double, 3>& gamma, LinkFamily family,
                          const Dataset& data) {
  EffectSet e;
  for (int a = 0; a < 2; ++a) {
    e.p_indirect_group[a] = indirect_effect(a, beta, gamma, family, data);
    e.p_direct_group[a] = direct_effect(a, beta, gamma, family, data);
  }
  e.p_indirect_marginal =
      marginalize(e.p_indirect_group[0], e.p_indirect_group[1], data.n0(), data.n1());
  e.p_direct_marginal =
      marginalize(e.p_direct_group[0], e.p_direct_group[1], data.n0(), data.n1());
  return e;
}

EffectSet closed_form_effects(double p_direct0, double p_direct1, double mediator_contrast0,
                              double mediator_contrast1, double outcome_contrast0,
                              double outcome_contrast1, double exposed_share) {
  EffectSet e;
  e.p_direct_group[0] = p_direct0;
  e.p_direct_group[1] = p_direct1;
  e.p_indirect_group[0] = mediator_contrast0 * outcome_contrast0;
  e.p_indirect_group[1] = mediator_contrast1 * outcome_contrast1;
  const double w1 = exposed_share;
  const double w0 = 1.0 - exposed_share;
  e.p_indirect_marginal = w0 * e.p_indirect_group[0] + w1 * e.p_indirect_group[1];
  e.p_direct_marginal = w0 * e.p_direct_group[0] + w1 * e.p_direct_group[1];
  return e;
}

EffectSet example_scenario() {
  // Unexposed group: direct benefit 0.3, 80% language gain, 50% outcome lift.
  // Exposed group: direct benefit 0.2, 50% language gain, 60% outcome lift.
  // 30% of the population is exposed.
  return closed_form_effects(0.3, 0.2, 0.8, 0.5, 0.5, 0.6, 0.3);
}

}  // namespace pathnnt
