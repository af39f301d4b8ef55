#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

#include "pathnnt/inference.hpp"
#include "pathnnt/links.hpp"
#include "pathnnt/simulate.hpp"
#include "pathnnt/types.hpp"

namespace pathnnt {

/// Full estimation report: the nine indices with intervals and flags, the
/// underlying effects, the regression coefficients with standard errors,
/// and run metadata.
struct EffectReport {
  std::size_t n = 0;
  std::size_t n0 = 0;
  std::size_t n1 = 0;
  LinkFamily family = LinkFamily::kLogit;
  double level = 0.95;
  std::optional<std::uint64_t> seed;

  ParameterVector theta;
  Eigen::VectorXd standard_errors;  // 32, NaN where unavailable
  std::array<Interval, layout::kDim> intervals;
  bool singular_covariance = false;
};

EffectReport build_report(const Dataset& data, const ParameterVector& theta,
                          const SandwichResult& sandwich_result,
                          const std::array<Interval, layout::kDim>& intervals,
                          LinkFamily family, double level,
                          std::optional<std::uint64_t> seed = std::nullopt);

/// JSON document for the report. Infinite indices serialize as the string
/// "inf" with null interval bounds; JSON itself has no infinity.
nlohmann::json report_to_json(const EffectReport& report);

/// JSON document for a coverage study.
nlohmann::json coverage_to_json(const SimulationConfig& config, const EffectSet& truth,
                                const CoverageReport& report);

/// JSON document for an oracle evaluation.
nlohmann::json oracle_to_json(const SimulationConfig& config, const McOracleResult& oracle);

/// Per-replication table (CSV) for a coverage study.
void write_replications_csv(std::ostream& out, const CoverageReport& report);

/// Nine-index table of the built-in example, values to four decimals.
std::string format_example_table(const EffectSet& effects);

}  // namespace pathnnt
