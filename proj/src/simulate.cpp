#include "pathnnt/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "pathnnt/accumulate.hpp"
#include "pathnnt/errors.hpp"
#include "pathnnt/inference.hpp"
#include "pathnnt/rng.hpp"
#include "pathnnt/stack.hpp"

namespace pathnnt {

namespace {

// Replication id reserved for the oracle sample; coverage replications are
// plain indices and stay far below this.
constexpr std::uint64_t kOracleRep = (1ull << 59);

int resolve_threads(int threads) {
  if (threads > 0) return threads;
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

// Runs task(i) for i in [0, count) on a small worker pool. Each index is
// processed exactly once and writes only to its own slot, so the outcome
// is identical for any pool size.
template <class Task>
void parallel_for(std::size_t count, int threads, Task&& task) {
  const int pool = std::min<std::size_t>(resolve_threads(threads), count == 0 ? 1 : count);
  if (pool <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> workers;
  workers.reserve(pool);
  for (int t = 0; t < pool; ++t) {
    workers.emplace_back([&]() {
      for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
        task(i);
      }
    });
  }
  for (auto& w : workers) w.join();
}

struct Subject {
  double confounder;
  int exposure;
  int mediator;
  int outcome;
};

Subject draw_subject(const CounterRng& rng, const SimulationConfig& config,
                     std::uint64_t j) {
  Subject s;
  s.confounder = config.mu + config.sigma * rng.normal(stream::kConfounder, j);
  const double p_exposed =
      inv_link(LinkFamily::kLogit, config.delta[0] + config.delta[1] * s.confounder);
  s.exposure = rng.bernoulli(stream::kExposure, j, p_exposed) ? 1 : 0;
  const double p_mediator =
      mediator_mean(config.gamma, s.exposure, s.confounder, config.family);
  s.mediator = rng.bernoulli(stream::kMediator, j, p_mediator) ? 1 : 0;
  const double p_outcome = outcome_mean(config.beta, s.exposure, s.mediator,
                                        s.confounder, config.family);
  s.outcome = rng.bernoulli(stream::kOutcome, j, p_outcome) ? 1 : 0;
  return s;
}

// Per-block accumulator for the oracle pass: groupwise sums of the model
// contrasts plus potential-outcome tallies.
struct OracleBlock {
  // per group: count, mediator contrast, outcome contrasts (01, 10, 11),
  // exposed-mediator mean, nested NIE tally
  std::array<double, 2> count{};
  std::array<double, 2> med_contrast{};
  std::array<double, 2> oc01{};
  std::array<double, 2> oc10{};
  std::array<double, 2> oc11{};
  std::array<double, 2> eta1{};
  std::array<double, 2> nested{};
  double nested_all = 0.0;
  double cde0 = 0.0;
  double cde1 = 0.0;

  OracleBlock& operator+=(const OracleBlock& o) {
    for (int a = 0; a < 2; ++a) {
      count[a] += o.count[a];
      med_contrast[a] += o.med_contrast[a];
      oc01[a] += o.oc01[a];
      oc10[a] += o.oc10[a];
      oc11[a] += o.oc11[a];
      eta1[a] += o.eta1[a];
      nested[a] += o.nested[a];
    }
    nested_all += o.nested_all;
    cde0 += o.cde0;
    cde1 += o.cde1;
    return *this;
  }
};

struct BlockEffects {
  bool valid = false;
  std::array<double, 9> effect{};  // index-slot order
  double nested_all = 0.0;
  std::array<double, 2> nested_group{};
  double cde0 = 0.0;
  double cde1 = 0.0;
};

BlockEffects effects_of_block(const OracleBlock& b) {
  BlockEffects e;
  if (b.count[0] < 1.0 || b.count[1] < 1.0) return e;
  e.valid = true;
  std::array<double, 2> pi{}, pd{};
  for (int a = 0; a < 2; ++a) {
    const double n_a = b.count[a];
    const double m1 = b.eta1[a] / n_a;
    pi[a] = (b.med_contrast[a] / n_a) * (b.oc01[a] / n_a);
    pd[a] = (b.oc10[a] / n_a) * (1.0 - m1) + (b.oc11[a] / n_a) * m1;
    e.nested_group[a] = b.nested[a] / n_a;
  }
  const double n = b.count[0] + b.count[1];
  const double pi_m = (b.count[0] * pi[0] + b.count[1] * pi[1]) / n;
  const double pd_m = (b.count[0] * pd[0] + b.count[1] * pd[1]) / n;
  e.effect = {pi[0], pi[1], pi_m,         pd[0],         pd[1],
              pd_m,  pi[0] + pd[0], pi[1] + pd[1], pi_m + pd_m};
  e.nested_all = b.nested_all / n;
  e.cde0 = b.cde0 / n;
  e.cde1 = b.cde1 / n;
  return e;
}

}  // namespace

Dataset generate(const SimulationConfig& config, std::uint64_t rep_index) {
  const CounterRng rng(config.seed, rep_index);
  std::vector<ObservationRecord> records;
  records.reserve(config.n);
  for (std::uint64_t j = 0; j < config.n; ++j) {
    const Subject s = draw_subject(rng, config, j);
    records.push_back({s.outcome, s.exposure, s.mediator, s.confounder});
  }
  return Dataset(std::move(records));
}

McOracleResult mc_oracle(const SimulationConfig& config, std::size_t draws,
                         int threads) {
  const CounterRng rng(config.seed, kOracleRep);
  const std::size_t n_blocks =
      draws >= 65536 ? 1024 : std::max<std::size_t>(1, draws / 64);

  std::vector<OracleBlock> blocks(n_blocks);
  parallel_for(n_blocks, threads, [&](std::size_t b) {
    const std::uint64_t lo = b * draws / n_blocks;
    const std::uint64_t hi = (b + 1) * draws / n_blocks;
    OracleBlock acc;
    for (std::uint64_t j = lo; j < hi; ++j) {
      const double u_l = rng.uniform(stream::kConfounder, j);
      const double l = config.mu + config.sigma * normal_quantile(u_l);
      const int a =
          rng.bernoulli(stream::kExposure, j,
                        inv_link(LinkFamily::kLogit,
                                 config.delta[0] + config.delta[1] * l))
              ? 1
              : 0;
      const double eta0 = mediator_mean(config.gamma, 0.0, l, config.family);
      const double eta1 = mediator_mean(config.gamma, 1.0, l, config.family);
      const double xi00 = outcome_mean(config.beta, 0.0, 0.0, l, config.family);
      const double xi01 = outcome_mean(config.beta, 0.0, 1.0, l, config.family);
      const double xi10 = outcome_mean(config.beta, 1.0, 0.0, l, config.family);
      const double xi11 = outcome_mean(config.beta, 1.0, 1.0, l, config.family);

      acc.count[a] += 1.0;
      acc.med_contrast[a] += eta1 - eta0;
      acc.oc01[a] += xi01 - xi00;
      acc.oc10[a] += xi10 - xi00;
      acc.oc11[a] += xi11 - xi01;
      acc.eta1[a] += eta1;

      // Potential-outcome route: one exogenous uniform drives the mediator
      // under both exposure levels, another drives the outcome across all
      // four (a, m) settings.
      const double u_m = rng.uniform(stream::kMediator, j);
      const double u_i = rng.uniform(stream::kOutcome, j);
      const int m0 = u_m < eta0 ? 1 : 0;
      const int m1 = u_m < eta1 ? 1 : 0;
      const int i00 = u_i < xi00 ? 1 : 0;
      const int i01 = u_i < xi01 ? 1 : 0;
      const int i10 = u_i < xi10 ? 1 : 0;
      const int i11 = u_i < xi11 ? 1 : 0;
      const double nested = (m1 == 1 ? i01 : i00) - (m0 == 1 ? i01 : i00);
      acc.nested[a] += nested;
      acc.nested_all += nested;
      acc.cde0 += i10 - i00;
      acc.cde1 += i11 - i01;
    }
    blocks[b] = acc;
  });

  const OracleBlock total = pairwise_sum(std::size_t{0}, n_blocks, OracleBlock{},
                                         [&](std::size_t b) { return blocks[b]; });
  if (total.count[0] < 1.0 || total.count[1] < 1.0) {
    throw EmptyGroup("oracle sample left an exposure group empty");
  }

  McOracleResult result;
  result.draws = draws;
  for (int a = 0; a < 2; ++a) {
    const double n_a = total.count[a];
    result.effects.p_indirect_group[a] =
        (total.med_contrast[a] / n_a) * (total.oc01[a] / n_a);
    const double m1 = total.eta1[a] / n_a;
    result.effects.p_direct_group[a] =
        (total.oc10[a] / n_a) * (1.0 - m1) + (total.oc11[a] / n_a) * m1;
    result.nested_nie_group[a] = total.nested[a] / n_a;
  }
  const double n = total.count[0] + total.count[1];
  result.effects.p_indirect_marginal = (total.count[0] * result.effects.p_indirect_group[0] +
                                        total.count[1] * result.effects.p_indirect_group[1]) /
                                       n;
  result.effects.p_direct_marginal = (total.count[0] * result.effects.p_direct_group[0] +
                                      total.count[1] * result.effects.p_direct_group[1]) /
                                     n;
  result.nested_nie_marginal = total.nested_all / n;
  result.cde[0] = total.cde0 / n;
  result.cde[1] = total.cde1 / n;

  // Batch-mean standard errors over the block estimates.
  std::vector<BlockEffects> be(n_blocks);
  std::size_t valid = 0;
  for (std::size_t b = 0; b < n_blocks; ++b) {
    be[b] = effects_of_block(blocks[b]);
    if (be[b].valid) ++valid;
  }
  auto batch_se = [&](auto&& value_of) {
    if (valid < 2) return 0.0;
    double mean = 0.0;
    for (const auto& x : be) {
      if (x.valid) mean += value_of(x);
    }
    mean /= static_cast<double>(valid);
    double ss = 0.0;
    for (const auto& x : be) {
      if (x.valid) {
        const double d = value_of(x) - mean;
        ss += d * d;
      }
    }
    return std::sqrt(ss / static_cast<double>(valid - 1) / static_cast<double>(valid));
  };
  for (int k = 0; k < 9; ++k) {
    result.effect_se[k] = batch_se([&](const BlockEffects& x) { return x.effect[k]; });
  }
  result.nested_nie_se = batch_se([&](const BlockEffects& x) { return x.nested_all; });
  for (int a = 0; a < 2; ++a) {
    result.nested_nie_group_se[a] =
        batch_se([&](const BlockEffects& x) { return x.nested_group[a]; });
  }
  result.cde_se[0] = batch_se([&](const BlockEffects& x) { return x.cde0; });
  result.cde_se[1] = batch_se([&](const BlockEffects& x) { return x.cde1; });
  return result;
}

std::array<ExtendedIndex, 9> estimate_indices(const Dataset& data, LinkFamily family) {
  return solve(data, family).indices;
}

CoverageReport coverage_study(const SimulationConfig& config, const EffectSet& truth,
                              int threads) {
  const std::array<ExtendedIndex, 9> true_indices = truth.indices();

  CoverageReport report;
  report.reps = config.reps;
  report.replications.resize(config.reps);

  parallel_for(config.reps, threads, [&](std::size_t r) {
    ReplicationOutcome& out = report.replications[r];
    out.rep = r;
    Dataset data = generate(config, r);
    ParameterVector theta;
    try {
      theta = solve(data, config.family);
    } catch (const Error&) {
      out.excluded = true;
      out.reason = ExclusionReason::kFitFailure;
      return;
    }
    out.estimates = theta.indices;
    const bool any_infinite =
        std::any_of(theta.indices.begin(), theta.indices.end(),
                    [](const ExtendedIndex& e) { return e.is_infinite(); });
    if (any_infinite) {
      out.excluded = true;
      out.reason = ExclusionReason::kInfiniteEstimate;
      return;
    }
    const SandwichResult sw = sandwich(data, theta, config.family);
    if (sw.singular) {
      out.excluded = true;
      out.reason = ExclusionReason::kSingularCovariance;
      return;
    }
    const auto intervals = confidence_intervals(sw, theta, config.level);
    for (int k = 0; k < 9; ++k) {
      const Interval& iv = intervals[layout::kIndex + k];
      out.lower[k] = iv.lower;
      out.upper[k] = iv.upper;
      out.covered[k] = !true_indices[k].is_infinite() &&
                       iv.lower <= true_indices[k].value() &&
                       true_indices[k].value() <= iv.upper;
    }
  });

  std::array<std::vector<double>, 9> retained_estimates;
  for (const auto& out : report.replications) {
    if (out.excluded) {
      switch (out.reason) {
        case ExclusionReason::kInfiniteEstimate: ++report.excluded_infinite; break;
        case ExclusionReason::kSingularCovariance: ++report.excluded_singular; break;
        case ExclusionReason::kFitFailure: ++report.excluded_fit_failure; break;
        case ExclusionReason::kNone: break;
      }
      continue;
    }
    ++report.retained;
    for (int k = 0; k < 9; ++k) {
      if (out.covered[k]) report.coverage[k] += 1.0;
      retained_estimates[k].push_back(out.estimates[k].value());
    }
  }
  if (report.retained > 0) {
    for (int k = 0; k < 9; ++k) {
      report.coverage[k] /= static_cast<double>(report.retained);
      auto& v = retained_estimates[k];
      double sum = 0.0;
      for (double x : v) sum += x;
      report.mean_estimate[k] = sum / static_cast<double>(v.size());
      std::sort(v.begin(), v.end());
      const std::size_t mid = v.size() / 2;
      report.median_estimate[k] =
          v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
    }
  }
  report.percent_excluded =
      config.reps == 0
          ? 0.0
          : 100.0 * static_cast<double>(config.reps - report.retained) /
                static_cast<double>(config.reps);
  return report;
}

}  // namespace pathnnt
