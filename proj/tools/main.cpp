// Command-line front end: estimate path-specific efficacy indices from a
// cohort CSV, run the coverage simulation, evaluate the Monte Carlo oracle,
// or print the built-in worked example.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "pathnnt/csv.hpp"
#include "pathnnt/effects.hpp"
#include "pathnnt/errors.hpp"
#include "pathnnt/inference.hpp"
#include "pathnnt/report.hpp"
#include "pathnnt/simulate.hpp"
#include "pathnnt/stack.hpp"
#include "pathnnt/version.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

pathnnt::LinkFamily parse_family(const std::string& name) {
  if (name == "logit") return pathnnt::LinkFamily::kLogit;
  if (name == "probit") return pathnnt::LinkFamily::kProbit;
  throw CLI::ValidationError("--family", "must be 'logit' or 'probit'");
}

template <std::size_t N>
std::array<double, N> parse_vector(const std::string& text, const std::string& flag) {
  std::array<double, N> out{};
  std::stringstream ss(text);
  std::string field;
  std::size_t k = 0;
  while (std::getline(ss, field, ',')) {
    if (k >= N) break;
    try {
      out[k] = std::stod(field);
    } catch (const std::exception&) {
      throw CLI::ValidationError(flag, "expected " + std::to_string(N) +
                                           " comma-separated reals");
    }
    ++k;
  }
  if (k != N) {
    throw CLI::ValidationError(flag,
                               "expected " + std::to_string(N) + " comma-separated reals");
  }
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw pathnnt::Error("cannot open output file: " + path);
  out << text;
}

void emit_json(const nlohmann::json& doc, const std::string& path) {
  const std::string text = doc.dump(2) + "\n";
  if (path.empty()) {
    std::cout << text;
  } else {
    write_text(path, text);
  }
}

struct SimFlags {
  std::string family = "logit";
  double mu = 0.5;
  double sigma = 0.1;
  std::string delta = "2,-3";
  std::string gamma = "-1,3,-2";
  std::string beta = "-1,1.5,1.5,-2";
  std::uint64_t seed = 0;
  double level = 0.95;
};

void add_model_flags(CLI::App* cmd, SimFlags& flags) {
  cmd->add_option("--family", flags.family, "Link family: logit or probit")
      ->capture_default_str();
  cmd->add_option("--mu", flags.mu, "Confounder mean")->capture_default_str();
  cmd->add_option("--sigma", flags.sigma, "Confounder standard deviation")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd->add_option("--delta", flags.delta, "Exposure model coefficients d0,dL")
      ->capture_default_str();
  cmd->add_option("--gamma", flags.gamma, "Mediator model coefficients g0,gA,gL")
      ->capture_default_str();
  cmd->add_option("--beta", flags.beta, "Outcome model coefficients b0,bA,bM,bL")
      ->capture_default_str();
  cmd->add_option("--seed", flags.seed, "Random seed")->capture_default_str();
}

pathnnt::SimulationConfig config_from_flags(const SimFlags& flags) {
  pathnnt::SimulationConfig config;
  config.family = parse_family(flags.family);
  config.mu = flags.mu;
  config.sigma = flags.sigma;
  config.delta = parse_vector<2>(flags.delta, "--delta");
  config.gamma = parse_vector<3>(flags.gamma, "--gamma");
  config.beta = parse_vector<4>(flags.beta, "--beta");
  config.seed = flags.seed;
  config.level = flags.level;
  return config;
}

int run_estimate(const std::string& input, const pathnnt::ColumnMap& columns,
                 const std::string& family_name, double level, const std::string& out_path) {
  const pathnnt::LinkFamily family = parse_family(family_name);
  const pathnnt::Dataset data = pathnnt::read_csv(input, columns);
  const pathnnt::ParameterVector theta = pathnnt::solve(data, family);
  const pathnnt::SandwichResult sw = pathnnt::sandwich(data, theta, family);
  if (sw.singular) {
    throw pathnnt::SingularBread(
        "sandwich covariance is singular (condition estimate " +
        std::to_string(sw.condition_estimate) + "); intervals are unavailable");
  }
  const auto intervals = pathnnt::confidence_intervals(sw, theta, level);
  const pathnnt::EffectReport report =
      pathnnt::build_report(data, theta, sw, intervals, family, level);
  emit_json(pathnnt::report_to_json(report), out_path);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Path-specific efficacy indices (NNT, NNE, EIN and their direct and "
               "indirect counterparts) from cohort data"};
  app.set_version_flag("--version", pathnnt::kVersion);
  app.require_subcommand(1);

  // estimate
  auto* estimate = app.add_subcommand("estimate", "Estimate indices from a CSV file");
  std::string input;
  pathnnt::ColumnMap columns;
  std::string est_family = "logit";
  double est_level = 0.95;
  std::string est_out;
  estimate->add_option("--input", input, "Input CSV path")->required();
  estimate->add_option("--outcome", columns.outcome, "Outcome column name")
      ->capture_default_str();
  estimate->add_option("--exposure", columns.exposure, "Exposure column name")
      ->capture_default_str();
  estimate->add_option("--mediator", columns.mediator, "Mediator column name")
      ->capture_default_str();
  estimate->add_option("--confounder", columns.confounder, "Confounder column name")
      ->capture_default_str();
  estimate->add_option("--family", est_family, "Link family: logit or probit")
      ->capture_default_str();
  estimate->add_option("--level", est_level, "Confidence level")
      ->check(CLI::Range(1e-6, 1.0 - 1e-6))
      ->capture_default_str();
  estimate->add_option("--out", est_out, "Report path (default: stdout)");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Run the coverage study");
  SimFlags sim_flags;
  std::size_t sim_n = 200;
  std::size_t sim_reps = 100;
  std::size_t sim_draws = 1000000;
  std::string sim_out = "coverage.json";
  std::string sim_reps_out;
  add_model_flags(simulate, sim_flags);
  simulate->add_option("--n", sim_n, "Sample size per replication")
      ->check(CLI::Range(std::size_t{2}, std::size_t{100000000}))
      ->capture_default_str();
  simulate->add_option("--reps", sim_reps, "Replication count")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  simulate->add_option("--draws", sim_draws, "Oracle draws for the true values")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  simulate->add_option("--level", sim_flags.level, "Confidence level")
      ->check(CLI::Range(1e-6, 1.0 - 1e-6))
      ->capture_default_str();
  simulate->add_option("--out", sim_out, "Coverage report JSON path")
      ->capture_default_str();
  simulate->add_option("--reps-out", sim_reps_out,
                       "Per-replication CSV path (default: <out>.reps.csv)");

  // oracle
  auto* oracle = app.add_subcommand("oracle", "Evaluate true index values by Monte Carlo");
  SimFlags oracle_flags;
  std::size_t oracle_draws = 10000000;
  std::string oracle_out;
  add_model_flags(oracle, oracle_flags);
  oracle->add_option("--draws", oracle_draws, "Monte Carlo sample size")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  oracle->add_option("--out", oracle_out, "Output JSON path (default: stdout)");

  // example
  auto* example = app.add_subcommand("example", "Print the built-in worked example");
  std::string example_out;
  example->add_option("--out", example_out, "Also write the table to a file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (estimate->parsed()) {
      return run_estimate(input, columns, est_family, est_level, est_out);
    }
    if (simulate->parsed()) {
      pathnnt::SimulationConfig config = config_from_flags(sim_flags);
      config.n = sim_n;
      config.reps = sim_reps;
      const pathnnt::McOracleResult truth = pathnnt::mc_oracle(config, sim_draws);
      const pathnnt::CoverageReport report =
          pathnnt::coverage_study(config, truth.effects);
      emit_json(pathnnt::coverage_to_json(config, truth.effects, report), sim_out);
      const std::string reps_path =
          sim_reps_out.empty() ? sim_out + ".reps.csv" : sim_reps_out;
      std::ofstream reps_file(reps_path);
      if (!reps_file) throw pathnnt::Error("cannot open output file: " + reps_path);
      pathnnt::write_replications_csv(reps_file, report);
      return kExitOk;
    }
    if (oracle->parsed()) {
      const pathnnt::SimulationConfig config = config_from_flags(oracle_flags);
      const pathnnt::McOracleResult result = pathnnt::mc_oracle(config, oracle_draws);
      emit_json(pathnnt::oracle_to_json(config, result), oracle_out);
      return kExitOk;
    }
    if (example->parsed()) {
      const std::string table = pathnnt::format_example_table(pathnnt::example_scenario());
      std::cout << table;
      if (!example_out.empty()) write_text(example_out, table);
      return kExitOk;
    }
  } catch (const CLI::Error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const pathnnt::ParseError& e) {
    std::cerr << "error (parse): " << e.what() << "\n";
    return kExitData;
  } catch (const pathnnt::EmptyGroup& e) {
    std::cerr << "error (data): " << e.what() << "\n";
    return kExitData;
  } catch (const pathnnt::RankDeficientDesign& e) {
    std::cerr << "error (rank-deficient design): " << e.what() << "\n";
    return kExitNumerical;
  } catch (const pathnnt::DidNotConverge& e) {
    std::cerr << "error (non-convergence): " << e.what() << " after " << e.iterations
              << " iterations, score norm " << e.score_norm << "\n";
    return kExitNumerical;
  } catch (const pathnnt::SingularBread& e) {
    std::cerr << "error (singular covariance): " << e.what() << "\n";
    return kExitNumerical;
  } catch (const pathnnt::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitUsage;
}
