#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "pathnnt/csv.hpp"
#include "pathnnt/errors.hpp"
#include "pathnnt/simulate.hpp"
#include "pathnnt/stack.hpp"
#include "pathnnt/version.hpp"

#ifndef PATHNNT_CLI_PATH
#error "PATHNNT_CLI_PATH must be defined"
#endif
#ifndef PATHNNT_SCHEMA_DIR
#error "PATHNNT_SCHEMA_DIR must be defined"
#endif

using nlohmann::json;
using namespace pathnnt;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunResult run_cli(const std::string& args) {
  const std::string out_path = "cli_stdout.tmp";
  const std::string err_path = "cli_stderr.tmp";
  const std::string cmd = std::string(PATHNNT_CLI_PATH) + " " + args + " > " + out_path +
                          " 2> " + err_path;
  const int raw = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WEXITSTATUS(raw);
  r.out = slurp(out_path);
  r.err = slurp(err_path);
  std::remove(out_path.c_str());
  std::remove(err_path.c_str());
  return r;
}

// Minimal JSON-schema checker covering the subset the shipped schemas use:
// type, enum, required, properties, items, minItems, maxItems and local
// $ref into #/definitions.
bool validates(const json& schema, const json& value, const json& root,
               std::string* why) {
  if (schema.contains("$ref")) {
    const std::string ref = schema["$ref"].get<std::string>();
    const std::string prefix = "#/definitions/";
    REQUIRE(ref.rfind(prefix, 0) == 0);
    return validates(root["definitions"][ref.substr(prefix.size())], value, root, why);
  }
  if (schema.contains("type")) {
    auto matches = [&](const std::string& t) {
      if (t == "object") return value.is_object();
      if (t == "array") return value.is_array();
      if (t == "string") return value.is_string();
      if (t == "boolean") return value.is_boolean();
      if (t == "null") return value.is_null();
      if (t == "integer") return value.is_number_integer() || value.is_number_unsigned();
      if (t == "number") return value.is_number();
      return false;
    };
    bool ok = false;
    if (schema["type"].is_array()) {
      for (const auto& t : schema["type"]) ok = ok || matches(t.get<std::string>());
    } else {
      ok = matches(schema["type"].get<std::string>());
    }
    if (!ok) {
      *why = "type mismatch at " + value.dump().substr(0, 60);
      return false;
    }
  }
  if (schema.contains("enum")) {
    bool ok = false;
    for (const auto& candidate : schema["enum"]) ok = ok || candidate == value;
    if (!ok) {
      *why = "enum mismatch: " + value.dump();
      return false;
    }
  }
  if (value.is_object()) {
    if (schema.contains("required")) {
      for (const auto& key : schema["required"]) {
        if (!value.contains(key.get<std::string>())) {
          *why = "missing required key " + key.get<std::string>();
          return false;
        }
      }
    }
    if (schema.contains("properties")) {
      for (const auto& [key, sub] : schema["properties"].items()) {
        if (value.contains(key) && !validates(sub, value[key], root, why)) {
          *why = key + ": " + *why;
          return false;
        }
      }
    }
  }
  if (value.is_array()) {
    if (schema.contains("minItems") && value.size() < schema["minItems"].get<std::size_t>()) {
      *why = "too few items";
      return false;
    }
    if (schema.contains("maxItems") && value.size() > schema["maxItems"].get<std::size_t>()) {
      *why = "too many items";
      return false;
    }
    if (schema.contains("items")) {
      for (const auto& item : value) {
        if (!validates(schema["items"], item, root, why)) return false;
      }
    }
  }
  return true;
}

void check_against_schema(const std::string& schema_file, const json& doc) {
  const json schema = json::parse(slurp(std::string(PATHNNT_SCHEMA_DIR) + "/" + schema_file));
  std::string why;
  const bool ok = validates(schema, doc, schema, &why);
  CAPTURE(why);
  CHECK(ok);
}

}  // namespace

TEST_CASE("example command prints the worked table") {
  const RunResult r = run_cli("example");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("EIN    2.0000") != std::string::npos);
  CHECK(r.out.find("DEIN   5.0000") != std::string::npos);
  CHECK(r.out.find("IEIN   3.3333") != std::string::npos);
  CHECK(r.out.find("NNE    1.4286") != std::string::npos);
  CHECK(r.out.find("DNNE   3.3333") != std::string::npos);
  CHECK(r.out.find("INNE   2.5000") != std::string::npos);
  CHECK(r.out.find("NNT    1.5625") != std::string::npos);
  CHECK(r.out.find("DNNT   3.7037") != std::string::npos);
  CHECK(r.out.find("INNT   2.7027") != std::string::npos);
}

TEST_CASE("estimate on a simulated file reproduces the in-memory solution") {
  SimulationConfig config;
  config.n = 1600;
  config.seed = 2;
  const Dataset data = generate(config, 0);
  write_csv("roundtrip.csv", data);

  const RunResult r = run_cli("estimate --input roundtrip.csv --out roundtrip.json");
  REQUIRE(r.exit_code == 0);
  const json doc = json::parse(slurp("roundtrip.json"));
  check_against_schema("report.schema.json", doc);

  const Dataset reread = read_csv("roundtrip.csv");
  REQUIRE(reread.size() == data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    CHECK(reread[i].confounder == data[i].confounder);
  }
  const ParameterVector theta = solve(data, config.family);
  // bit-exact round trip: the file path and the in-memory path agree
  CHECK(doc["indices"]["NNT"]["estimate"].get<double>() ==
        theta.index(IndexId::kNnt).value());
  CHECK(doc["effects"]["p_indirect"]["marginal"].get<double>() == theta.p_indirect[2]);
  CHECK(doc["effects"]["p_total"]["marginal"].get<double>() ==
        theta.p_indirect[2] + theta.p_direct[2]);
  CHECK(doc["meta"]["n"].get<std::size_t>() == config.n);
  CHECK(doc["meta"]["seed"].is_null());

  // reported totals decompose exactly
  for (const char* g : {"group0", "group1", "marginal"}) {
    CHECK(doc["effects"]["p_total"][g].get<double>() ==
          doc["effects"]["p_direct"][g].get<double>() +
              doc["effects"]["p_indirect"][g].get<double>());
  }
  // NNT near the reference configuration's known value
  CHECK(std::abs(doc["indices"]["NNT"]["estimate"].get<double>() - 2.07) < 0.5);

  std::remove("roundtrip.csv");
  std::remove("roundtrip.json");
}

TEST_CASE("estimate validation failures") {
  SUBCASE("missing file") {
    const RunResult r = run_cli("estimate --input does_not_exist.csv");
    CHECK(r.exit_code == 3);
    CHECK(r.err.find("does_not_exist.csv") != std::string::npos);
  }
  SUBCASE("non-binary mediator names line and column") {
    std::ofstream out("bad.csv");
    out << "I,A,M,L\n1,0,1,0.5\n0,1,2,0.25\n";
    out.close();
    const RunResult r = run_cli("estimate --input bad.csv");
    CHECK(r.exit_code == 3);
    CHECK(r.err.find("line 3") != std::string::npos);
    CHECK(r.err.find("'M'") != std::string::npos);
    std::remove("bad.csv");
  }
  SUBCASE("empty exposure group") {
    std::ofstream out("onegroup.csv");
    out << "I,A,M,L\n";
    for (int i = 0; i < 20; ++i) out << (i % 2) << ",1," << ((i / 2) % 2) << ",0." << i << "\n";
    out.close();
    const RunResult r = run_cli("estimate --input onegroup.csv");
    CHECK(r.exit_code == 3);
    CHECK(r.err.find("exposure group") != std::string::npos);
    std::remove("onegroup.csv");
  }
  SUBCASE("unknown flag is a usage error") {
    const RunResult r = run_cli("estimate --frobnicate 1");
    CHECK(r.exit_code == 2);
  }
  SUBCASE("bad family value") {
    std::ofstream out("tiny.csv");
    out << "I,A,M,L\n1,0,1,0.5\n0,1,0,0.25\n";
    out.close();
    const RunResult r = run_cli("estimate --input tiny.csv --family cauchit");
    CHECK(r.exit_code == 2);
    std::remove("tiny.csv");
  }
}

TEST_CASE("estimate honors column mapping") {
  std::ofstream out("mapped.csv");
  out << "id,emigrated,degree,language,age\n";
  SimulationConfig config;
  config.n = 400;
  config.seed = 14;
  const Dataset data = generate(config, 0);
  for (std::size_t i = 0; i < data.size(); ++i) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", data[i].confounder);
    out << i << ',' << data[i].outcome << ',' << data[i].exposure << ','
        << data[i].mediator << ',' << buf << "\n";
  }
  out.close();
  const RunResult r = run_cli(
      "estimate --input mapped.csv --outcome emigrated --exposure degree "
      "--mediator language --confounder age --out mapped.json");
  REQUIRE(r.exit_code == 0);
  const json doc = json::parse(slurp("mapped.json"));
  const ParameterVector theta = solve(data, config.family);
  CHECK(doc["indices"]["NNT"]["estimate"].get<double>() ==
        theta.index(IndexId::kNnt).value());
  std::remove("mapped.csv");
  std::remove("mapped.json");
}

TEST_CASE("oracle command output") {
  const RunResult r = run_cli("oracle --draws 200000 --seed 5 --out oracle.json");
  REQUIRE(r.exit_code == 0);
  const json doc = json::parse(slurp("oracle.json"));
  CHECK(doc["schema"] == kOracleSchema);
  CHECK(std::abs(doc["indices"]["NNT"]["value"].get<double>() - 2.07) < 0.05);
  CHECK(doc["diagnostics"]["nested_nie"].contains("marginal"));
  std::remove("oracle.json");
}

TEST_CASE("simulate command is deterministic and schema-stable") {
  const std::string flags =
      "simulate --n 200 --reps 10 --seed 7 --draws 100000 --out cov_a.json "
      "--reps-out reps_a.csv";
  const RunResult a = run_cli(flags);
  REQUIRE(a.exit_code == 0);
  const RunResult b = run_cli(
      "simulate --n 200 --reps 10 --seed 7 --draws 100000 --out cov_b.json "
      "--reps-out reps_b.csv");
  REQUIRE(b.exit_code == 0);

  CHECK(slurp("cov_a.json") == slurp("cov_b.json"));
  CHECK(slurp("reps_a.csv") == slurp("reps_b.csv"));

  const json doc = json::parse(slurp("cov_a.json"));
  check_against_schema("coverage.schema.json", doc);
  CHECK(doc["reps"] == 10);

  // per-replication table has a header and one row per replication
  std::istringstream reps(slurp("reps_a.csv"));
  std::string line;
  std::getline(reps, line);
  CHECK(line.rfind("rep,excluded,reason", 0) == 0);
  int rows = 0;
  while (std::getline(reps, line)) rows += !line.empty();
  CHECK(rows == 10);

  for (const char* path : {"cov_a.json", "cov_b.json", "reps_a.csv", "reps_b.csv"}) {
    std::remove(path);
  }
}

TEST_CASE("infinite indices serialize as the string inf with null bounds") {
  // a null structural model makes degenerate indices very likely
  SimulationConfig config;
  config.n = 300;
  config.seed = 31;
  config.beta = {-1.0, 0.0, 0.0, -2.0};
  config.gamma = {-1.0, 0.0, -2.0};
  for (std::uint64_t rep = 0; rep < 20; ++rep) {
    const Dataset data = generate(config, rep);
    ParameterVector theta;
    try {
      theta = solve(data, config.family);
    } catch (const Error&) {
      continue;
    }
    bool any_infinite = false;
    for (const auto& ix : theta.indices) any_infinite |= ix.is_infinite();
    if (!any_infinite) continue;

    write_csv("null.csv", data);
    const RunResult r = run_cli("estimate --input null.csv --out null.json");
    if (r.exit_code != 0) continue;  // singular sandwich is a legitimate outcome here
    const json doc = json::parse(slurp("null.json"));
    check_against_schema("report.schema.json", doc);
    bool saw_inf = false;
    for (const auto& [name, entry] : doc["indices"].items()) {
      if (entry["infinite"].get<bool>()) {
        saw_inf = true;
        CHECK(entry["estimate"] == json("inf"));
        CHECK(entry["ci"][0].is_null());
        CHECK(entry["ci"][1].is_null());
        CHECK(entry["se"].is_null());
      }
    }
    CHECK(saw_inf);
    std::remove("null.csv");
    std::remove("null.json");
    return;
  }
  FAIL("no replication with a degenerate index was found");
}
