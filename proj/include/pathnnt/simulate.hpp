#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "pathnnt/effects.hpp"
#include "pathnnt/links.hpp"
#include "pathnnt/types.hpp"

namespace pathnnt {

/// Data-generating parameters of the cohort model:
///   L ~ Normal(mu, sigma^2)
///   A | L ~ Bernoulli(expit(delta0 + deltaL L))           (always logistic)
///   M | A, L ~ Bernoulli(xi(gamma0 + gammaA A + gammaL L))
///   I | A, M, L ~ Bernoulli(xi(beta0 + betaA A + betaM M + betaL L))
/// with xi the inverse link of `family`. Defaults are the reference
/// configuration used across the test-bench.
struct SimulationConfig {
  double mu = 0.5;
  double sigma = 0.1;
  std::array<double, 2> delta{2.0, -3.0};
  std::array<double, 3> gamma{-1.0, 3.0, -2.0};
  std::array<double, 4> beta{-1.0, 1.5, 1.5, -2.0};
  LinkFamily family = LinkFamily::kLogit;
  std::size_t n = 200;
  std::size_t reps = 100;
  std::uint64_t seed = 0;
  double level = 0.95;
};

/// Draws one dataset. Deterministic given (config.seed, rep_index); the
/// same pair always yields a bit-identical dataset.
Dataset generate(const SimulationConfig& config, std::uint64_t rep_index);

/// Population-scale effect values plus potential-outcome diagnostics.
///
/// `effects` carries the factorized estimands evaluated with the true
/// coefficients over the group-conditional confounder draws; these are the
/// reference values used for coverage. The nested_* and cde_* fields come
/// from the brute-force potential-outcome route (per-subject mediator and
/// outcome draws), reported with batch-mean standard errors as diagnostics.
struct McOracleResult {
  EffectSet effects;
  std::array<double, 9> effect_se{};  // MC SEs in index-slot order (benefit scale)

  double nested_nie_marginal = 0.0;
  double nested_nie_se = 0.0;
  std::array<double, 2> nested_nie_group{};
  std::array<double, 2> nested_nie_group_se{};
  std::array<double, 2> cde{};  // controlled direct effect at m = 0, 1
  std::array<double, 2> cde_se{};
  std::size_t draws = 0;
};

/// Monte Carlo evaluation of the true effects under the configuration.
/// Deterministic given config.seed and draws; uses a dedicated replication
/// id so it never collides with coverage replications.
McOracleResult mc_oracle(const SimulationConfig& config, std::size_t draws,
                         int threads = 0);

enum class ExclusionReason { kNone, kInfiniteEstimate, kSingularCovariance, kFitFailure };

/// One replication of the coverage study.
struct ReplicationOutcome {
  std::uint64_t rep = 0;
  bool excluded = false;
  ExclusionReason reason = ExclusionReason::kNone;
  std::array<ExtendedIndex, 9> estimates{};
  std::array<double, 9> lower{};  // meaningful only when retained
  std::array<double, 9> upper{};
  std::array<bool, 9> covered{};
};

/// Coverage study summary. Replications with any infinite index estimate,
/// a singular covariance or a failed fit are excluded from coverage and
/// tallied; coverage denominators use retained replications only.
struct CoverageReport {
  std::array<double, 9> coverage{};
  std::array<double, 9> mean_estimate{};    // over retained replications
  std::array<double, 9> median_estimate{};  // over retained replications
  std::size_t reps = 0;
  std::size_t retained = 0;
  std::size_t excluded_infinite = 0;
  std::size_t excluded_singular = 0;
  std::size_t excluded_fit_failure = 0;
  double percent_excluded = 0.0;
  std::vector<ReplicationOutcome> replications;
};

/// Runs the full generate -> solve -> sandwich -> interval loop for every
/// replication and scores the intervals against the supplied truth.
/// Replications are independent work units; the report is identical for
/// any thread count (0 = hardware concurrency).
CoverageReport coverage_study(const SimulationConfig& config, const EffectSet& truth,
                              int threads = 0);

/// Point estimates of the nine indices for one dataset (no covariance).
std::array<ExtendedIndex, 9> estimate_indices(const Dataset& data, LinkFamily family);

}  // namespace pathnnt
