#include "pathnnt/report.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "pathnnt/version.hpp"

namespace pathnnt {

namespace {

using nlohmann::json;

json index_value(const ExtendedIndex& idx) {
  if (idx.is_infinite()) return json("inf");
  return json(idx.value());
}

json finite_or_null(double x) {
  if (std::isfinite(x)) return json(x);
  return json(nullptr);
}

json interval_json(const Interval& iv) {
  if (iv.infinite) return json::array({nullptr, nullptr});
  return json::array({finite_or_null(iv.lower), finite_or_null(iv.upper)});
}

std::string four_decimals(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", x);
  return buf;
}

}  // namespace

EffectReport build_report(const Dataset& data, const ParameterVector& theta,
                          const SandwichResult& sandwich_result,
                          const std::array<Interval, layout::kDim>& intervals,
                          LinkFamily family, double level,
                          std::optional<std::uint64_t> seed) {
  EffectReport report;
  report.n = data.size();
  report.n0 = data.n0();
  report.n1 = data.n1();
  report.family = family;
  report.level = level;
  report.seed = seed;
  report.theta = theta;
  report.standard_errors = sandwich_result.standard_errors;
  report.intervals = intervals;
  report.singular_covariance = sandwich_result.singular;
  return report;
}

json report_to_json(const EffectReport& report) {
  const auto& th = report.theta;
  json doc;
  doc["schema"] = kReportSchema;
  doc["meta"] = {
      {"software_version", kVersion},
      {"n", report.n},
      {"n0", report.n0},
      {"n1", report.n1},
      {"family", link_name(report.family)},
      {"level", report.level},
      {"seed", report.seed.has_value() ? json(*report.seed) : json(nullptr)},
  };

  const Eigen::VectorXd flat = report.theta.pack();
  auto coefficient_block = [&](int offset, int count) {
    json estimates = json::array();
    json ses = json::array();
    for (int k = 0; k < count; ++k) {
      estimates.push_back(flat[offset + k]);
      ses.push_back(finite_or_null(report.standard_errors[offset + k]));
    }
    return json{{"estimate", estimates}, {"se", ses}};
  };
  doc["coefficients"] = {
      {"beta", coefficient_block(layout::kBeta, 4)},
      {"gamma", coefficient_block(layout::kGamma, 3)},
  };

  doc["effects"] = {
      {"p_indirect",
       {{"group0", th.p_indirect[0]}, {"group1", th.p_indirect[1]}, {"marginal", th.p_indirect[2]}}},
      {"p_direct",
       {{"group0", th.p_direct[0]}, {"group1", th.p_direct[1]}, {"marginal", th.p_direct[2]}}},
      {"p_total",
       {{"group0", th.p_total(0)}, {"group1", th.p_total(1)}, {"marginal", th.p_total(2)}}},
  };

  json indices = json::object();
  json degenerate = json::array();
  for (int k = 0; k < 9; ++k) {
    const ExtendedIndex& idx = th.indices[k];
    const Interval& iv = report.intervals[layout::kIndex + k];
    indices[kIndexNames[k]] = {
        {"estimate", index_value(idx)},
        {"se", finite_or_null(report.standard_errors[layout::kIndex + k])},
        {"ci", interval_json(iv)},
        {"infinite", idx.is_infinite()},
    };
    if (idx.is_infinite()) degenerate.push_back(kIndexNames[k]);
  }
  doc["indices"] = indices;
  doc["flags"] = {
      {"singular_covariance", report.singular_covariance},
      {"degenerate_indices", degenerate},
  };
  return doc;
}

json coverage_to_json(const SimulationConfig& config, const EffectSet& truth,
                      const CoverageReport& report) {
  json doc;
  doc["schema"] = kCoverageSchema;
  doc["meta"] = {{"software_version", kVersion}};
  doc["config"] = {
      {"mu", config.mu},
      {"sigma", config.sigma},
      {"delta", config.delta},
      {"gamma", config.gamma},
      {"beta", config.beta},
      {"family", link_name(config.family)},
      {"n", config.n},
      {"reps", config.reps},
      {"seed", config.seed},
      {"level", config.level},
  };
  json truth_json = json::object();
  const auto truth_indices = truth.indices();
  for (int k = 0; k < 9; ++k) {
    truth_json[kIndexNames[k]] = index_value(truth_indices[k]);
  }
  doc["truth"] = truth_json;

  json per_index = json::object();
  for (int k = 0; k < 9; ++k) {
    per_index[kIndexNames[k]] = {
        {"coverage", report.coverage[k]},
        {"mean", report.mean_estimate[k]},
        {"median", report.median_estimate[k]},
    };
  }
  doc["per_index"] = per_index;
  doc["reps"] = report.reps;
  doc["retained"] = report.retained;
  doc["percent_excluded"] = report.percent_excluded;
  doc["exclusions"] = {
      {"infinite_estimate", report.excluded_infinite},
      {"singular_covariance", report.excluded_singular},
      {"fit_failure", report.excluded_fit_failure},
  };
  return doc;
}

json oracle_to_json(const SimulationConfig& config, const McOracleResult& oracle) {
  json doc;
  doc["schema"] = kOracleSchema;
  doc["meta"] = {{"software_version", kVersion}, {"draws", oracle.draws}, {"seed", config.seed}};
  doc["config"] = {
      {"mu", config.mu},        {"sigma", config.sigma}, {"delta", config.delta},
      {"gamma", config.gamma},  {"beta", config.beta},   {"family", link_name(config.family)},
  };
  const auto& e = oracle.effects;
  doc["effects"] = {
      {"p_indirect", {{"group0", e.p_indirect_group[0]}, {"group1", e.p_indirect_group[1]}, {"marginal", e.p_indirect_marginal}}},
      {"p_direct", {{"group0", e.p_direct_group[0]}, {"group1", e.p_direct_group[1]}, {"marginal", e.p_direct_marginal}}},
      {"p_total", {{"group0", e.p_total_group(0)}, {"group1", e.p_total_group(1)}, {"marginal", e.p_total_marginal()}}},
  };
  json indices = json::object();
  const auto idx = e.indices();
  for (int k = 0; k < 9; ++k) {
    indices[kIndexNames[k]] = {
        {"value", index_value(idx[k])},
        {"mc_se_benefit_scale", oracle.effect_se[k]},
    };
  }
  doc["indices"] = indices;
  doc["diagnostics"] = {
      {"nested_nie",
       {{"marginal", oracle.nested_nie_marginal},
        {"marginal_se", oracle.nested_nie_se},
        {"group0", oracle.nested_nie_group[0]},
        {"group0_se", oracle.nested_nie_group_se[0]},
        {"group1", oracle.nested_nie_group[1]},
        {"group1_se", oracle.nested_nie_group_se[1]}}},
      {"controlled_direct_effect",
       {{"m0", oracle.cde[0]},
        {"m0_se", oracle.cde_se[0]},
        {"m1", oracle.cde[1]},
        {"m1_se", oracle.cde_se[1]}}},
  };
  return doc;
}

void write_replications_csv(std::ostream& out, const CoverageReport& report) {
  out << "rep,excluded,reason";
  for (int k = 0; k < 9; ++k) {
    out << ',' << kIndexNames[k] << ',' << kIndexNames[k] << "_lo," << kIndexNames[k]
        << "_hi," << kIndexNames[k] << "_covered";
  }
  out << '\n';
  auto reason_name = [](ExclusionReason r) {
    switch (r) {
      case ExclusionReason::kNone: return "";
      case ExclusionReason::kInfiniteEstimate: return "infinite_estimate";
      case ExclusionReason::kSingularCovariance: return "singular_covariance";
      case ExclusionReason::kFitFailure: return "fit_failure";
    }
    return "";
  };
  char buf[64];
  auto emit = [&](double x) {
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    out << buf;
  };
  for (const auto& rep : report.replications) {
    out << rep.rep << ',' << (rep.excluded ? 1 : 0) << ',' << reason_name(rep.reason);
    for (int k = 0; k < 9; ++k) {
      out << ',';
      if (rep.reason != ExclusionReason::kFitFailure) {
        if (rep.estimates[k].is_infinite()) {
          out << "inf";
        } else {
          emit(rep.estimates[k].value());
        }
      }
      out << ',';
      if (!rep.excluded) emit(rep.lower[k]);
      out << ',';
      if (!rep.excluded) emit(rep.upper[k]);
      out << ',';
      if (!rep.excluded) out << (rep.covered[k] ? 1 : 0);
    }
    out << '\n';
  }
}

std::string format_example_table(const EffectSet& effects) {
  const auto idx = effects.indices();
  std::string out = "index  estimate\n";
  // Present by pathway: total, direct, indirect within each group ordering.
  const std::array<IndexId, 9> order = {
      IndexId::kEin,  IndexId::kDein, IndexId::kIein, IndexId::kNne, IndexId::kDnne,
      IndexId::kInne, IndexId::kNnt,  IndexId::kDnnt, IndexId::kInnt};
  for (IndexId id : order) {
    const int k = static_cast<int>(id);
    out += kIndexNames[k];
    out.append(7 - std::string(kIndexNames[k]).size(), ' ');
    out += idx[k].is_infinite() ? "inf" : four_decimals(idx[k].value());
    out += '\n';
  }
  return out;
}

}  // namespace pathnnt
