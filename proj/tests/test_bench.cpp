#include "srld/bench/cli.hpp"
#include "srld/bench/config.hpp"
#include "srld/bench/experiment.hpp"
#include "srld/bench/report.hpp"
#include "srld/bench/stats.hpp"

#include <nlohmann/json.hpp>

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace srld;
using namespace srld::bench;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("srld-test-" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// exact binomial tail via Pascal's triangle (test-side oracle)
double pascal_tail(int wins, int n) {
  std::vector<std::vector<double>> c(n + 1);
  for (int i = 0; i <= n; ++i) {
    c[i].assign(i + 1, 1.0);
    for (int j = 1; j < i; ++j) c[i][j] = c[i - 1][j - 1] + c[i - 1][j];
  }
  double tail = 0.0;
  for (int k = wins; k <= n; ++k) tail += c[n][k];
  return tail / std::pow(2.0, n);
}

json tiny_config_json(const std::string& out_dir) {
  json j;
  j["target"] = {{"variant", "isotropic_gaussian"}, {"dim", 2},
                 {"variance", 1.0}};
  j["methods"] = json::array();
  json srld_m = {{"name", "srld"},      {"kind", "srld"},
                 {"step_size", 0.01},   {"alpha", 0.0},
                 {"window", 2},         {"thinning", 5},
                 {"total_steps", 400},  {"bandwidth", "median"}};
  json ld_m = {{"name", "langevin"},  {"kind", "langevin"},
               {"step_size", 0.01},   {"window", 2},
               {"thinning", 5},       {"total_steps", 400}};
  j["methods"].push_back(srld_m);
  j["methods"].push_back(ld_m);
  j["pairing"] = "coupled-noise";
  j["seeds"] = {1, 2, 3};
  j["reference"] = {{"count", 256}};
  j["outputs"] = out_dir;
  j["reporting"] = {{"keep_every", 1}, {"max_lag", 10},
                    {"metric_sample_cap", 128}};
  return j;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE("bench") {

TEST_CASE("sign test matches the exact binomial tail for n <= 25") {
  for (int n = 0; n <= 25; ++n)
    for (int wins = 0; wins <= n; ++wins)
      CHECK(binomial_tail_p(wins, n) ==
            doctest::Approx(pascal_tail(wins, n)).epsilon(1e-12));
}

TEST_CASE("sign test p-value semantics") {
  CHECK(sign_test_p({}, true) == 1.0);
  CHECK(sign_test_p({0.0, 0.0}, true) == 1.0);  // all ties
  // 5 negative diffs out of 5, lower is better: p = 2^-5
  CHECK(sign_test_p({-1, -2, -3, -4, -5}, true) ==
        doctest::Approx(1.0 / 32.0).epsilon(1e-12));
  // same data, higher is better: p = 1
  CHECK(sign_test_p({-1, -2, -3, -4, -5}, false) == 1.0);
}

TEST_CASE("config parsing and validation diagnostics") {
  const json good = tiny_config_json("");
  const ExperimentConfig config = parse_experiment_config(good);
  CHECK(config.methods.size() == 2);
  CHECK(config.pairing == Pairing::coupled_noise);
  CHECK(config.seeds.size() == 3);
  CHECK(config.reporting.metric_sample_cap == 128);

  json bad = good;
  bad["methods"][1]["total_steps"] = 999;  // breaks coupled pairing
  CHECK_THROWS_WITH_AS(parse_experiment_config(bad),
                       doctest::Contains("total_steps"),
                       std::invalid_argument);

  bad = good;
  bad["methods"][1]["name"] = "srld";  // duplicate
  CHECK_THROWS_WITH_AS(parse_experiment_config(bad),
                       doctest::Contains("duplicate"), std::invalid_argument);

  bad = good;
  bad.erase("seeds");
  CHECK_THROWS_WITH_AS(parse_experiment_config(bad), doctest::Contains("seeds"),
                       std::invalid_argument);

  bad = good;
  bad["target"] = {{"variant", "isotropic_gaussian"}, {"dim", 2},
                   {"variance", -1.0}};
  CHECK_THROWS_WITH_AS(parse_experiment_config(bad),
                       doctest::Contains("variance"), std::invalid_argument);
}

TEST_CASE("inline target syntax") {
  CHECK(std::holds_alternative<Banana2dSpec>(parse_target_inline("banana2d")));
  const TargetSpec g = parse_target_inline("gaussian:d=3,var=0.5");
  const auto& gs = std::get<IsotropicGaussianSpec>(g);
  CHECK(gs.dim == 3);
  CHECK(gs.variance == 0.5);
  const TargetSpec m = parse_target_inline("mixture:d=2,mode=1");
  CHECK(std::get<GaussMixtureSpec>(m).means.size() == 2);
  CHECK_THROWS_AS(parse_target_inline("cauchy:d=2"), std::invalid_argument);
  CHECK_THROWS_AS(parse_target_inline("gaussian:d=2,foo=1"),
                  std::invalid_argument);
}

TEST_CASE("coupled experiment with identical methods: zero diffs, p = 1") {
  json j = tiny_config_json("");
  j["methods"][1] = j["methods"][0];
  j["methods"][1]["name"] = "srld-b";
  const ComparisonResult r = run_experiment(parse_experiment_config(j));
  for (const auto& [key, diffs] : r.aggregate.paired_diffs) {
    for (double d : diffs) CHECK(d == 0.0);
    CHECK(r.aggregate.sign_test_p.at(key) == 1.0);
  }
}

TEST_CASE("coupled srld(alpha=0) vs langevin: identical per-seed metrics") {
  const ComparisonResult r =
      run_experiment(parse_experiment_config(tiny_config_json("")));
  REQUIRE(r.methods.size() == 2);
  for (std::size_t s = 0; s < r.seeds.size(); ++s) {
    const SeedMetrics& a = r.methods[0].per_seed[s];
    const SeedMetrics& b = r.methods[1].per_seed[s];
    CHECK(!a.failed);
    CHECK(a.mmd2 == b.mmd2);
    CHECK(a.w1 == b.w1);
    CHECK(a.ess_mean == b.ess_mean);
  }
}

TEST_CASE("emitted file contract: 1 seed, 2 methods") {
  const fs::path dir = fresh_dir("files");
  json j = tiny_config_json(dir.string());
  j["seeds"] = {7};
  run_experiment(parse_experiment_config(j));
  CHECK(fs::exists(dir / "metrics.json"));
  CHECK(fs::exists(dir / "traces" / "srld_7.csv"));
  CHECK(fs::exists(dir / "traces" / "langevin_7.csv"));
  int svgs = 0;
  for (const auto& e : fs::directory_iterator(dir / "plots"))
    if (e.path().extension() == ".svg") ++svgs;
  CHECK(svgs >= 3);
  fs::remove_all(dir);
}

TEST_CASE("metrics.json round-trips field-wise") {
  const fs::path dir = fresh_dir("roundtrip");
  json j = tiny_config_json(dir.string());
  j["seeds"] = {1, 2};
  const ComparisonResult r = run_experiment(parse_experiment_config(j));
  const json emitted = json::parse(slurp(dir / "metrics.json"));
  const ComparisonResult parsed = metrics_from_json(emitted);
  CHECK(parsed.method_names == r.method_names);
  CHECK(parsed.seeds == r.seeds);
  CHECK(parsed.target == r.target);
  REQUIRE(parsed.methods.size() == r.methods.size());
  for (std::size_t i = 0; i < r.methods.size(); ++i) {
    for (std::size_t s = 0; s < r.seeds.size(); ++s) {
      const SeedMetrics& a = r.methods[i].per_seed[s];
      const SeedMetrics& b = parsed.methods[i].per_seed[s];
      CHECK(a.failed == b.failed);
      CHECK(a.mmd2 == doctest::Approx(b.mmd2).epsilon(1e-12));
      CHECK(a.w1 == doctest::Approx(b.w1).epsilon(1e-12));
      CHECK(a.ess_mean == doctest::Approx(b.ess_mean).epsilon(1e-12));
      CHECK(a.autocorr.size() == b.autocorr.size());
    }
  }
  CHECK(metrics_to_json(parsed) == emitted);
  fs::remove_all(dir);
}

TEST_CASE("end-to-end determinism: byte-identical metrics.json") {
  const fs::path dir1 = fresh_dir("det1");
  const fs::path dir2 = fresh_dir("det2");
  json j = tiny_config_json(dir1.string());
  run_experiment(parse_experiment_config(j));
  j["outputs"] = dir2.string();
  run_experiment(parse_experiment_config(j));
  CHECK(slurp(dir1 / "metrics.json") == slurp(dir2 / "metrics.json"));
  CHECK(slurp(dir1 / "traces" / "srld_1.csv") ==
        slurp(dir2 / "traces" / "srld_1.csv"));
  fs::remove_all(dir1);
  fs::remove_all(dir2);
}

TEST_CASE("trace csv round trip") {
  const fs::path dir = fresh_dir("csv");
  Trace trace;
  trace.burnin_steps = 2;
  for (int k = 0; k <= 5; ++k) {
    Eigen::VectorXd s(2);
    s << 0.125 * k, -1.5 * k;
    trace.states.push_back(s);
  }
  trace.meta.resize(5);
  const std::string path = (dir / "t.csv").string();
  write_trace_csv(trace, path);
  const TraceCsv read = read_trace_csv(path);
  CHECK(read.states.rows() == 6);
  CHECK(read.iters.size() == 6);
  CHECK(read.phases.size() == 6);
  CHECK(read.phases[0] == "burnin");
  CHECK(read.phases[2] == "burnin");
  CHECK(read.phases[3] == "repulsive");
  for (int k = 0; k <= 5; ++k) {
    CHECK(read.states(k, 0) == trace.states[k][0]);
    CHECK(read.states(k, 1) == trace.states[k][1]);
  }
  fs::remove_all(dir);
}

TEST_CASE("cli: reduction gives byte-identical trace csvs") {
  const fs::path dir_a = fresh_dir("cli-a");
  const fs::path dir_b = fresh_dir("cli-b");
  std::ostringstream out, err;
  const int code_a = cli_main(
      {"sample", "--target", "gaussian:d=2", "--method", "srld", "--alpha",
       "0", "--seed", "7", "--steps", "500", "--window", "2", "--thin", "5",
       "--out", dir_a.string()},
      out, err);
  const int code_b = cli_main(
      {"sample", "--target", "gaussian:d=2", "--method", "langevin", "--seed",
       "7", "--steps", "500", "--window", "2", "--thin", "5", "--out",
       dir_b.string()},
      out, err);
  REQUIRE(code_a == 0);
  REQUIRE(code_b == 0);
  CHECK(slurp(dir_a / "traces" / "srld_7.csv") ==
        slurp(dir_b / "traces" / "langevin_7.csv"));
  fs::remove_all(dir_a);
  fs::remove_all(dir_b);
}

TEST_CASE("cli: diagnose on identical files reports zero discrepancy") {
  const fs::path dir = fresh_dir("cli-diag");
  std::ostringstream out, err;
  REQUIRE(cli_main({"sample", "--target", "gaussian:d=2", "--method",
                    "langevin", "--seed", "1", "--steps", "300", "--window",
                    "2", "--thin", "5", "--out", dir.string()},
                   out, err) == 0);
  const std::string trace = (dir / "traces" / "langevin_1.csv").string();
  std::ostringstream diag_out;
  REQUIRE(cli_main({"diagnose", "--trace", trace, "--reference", trace},
                   diag_out, err) == 0);
  CHECK(diag_out.str().find("mmd2: 0 ") != std::string::npos);
  CHECK(diag_out.str().find("w1: 0\n") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("cli: exit codes") {
  std::ostringstream out, err;
  CHECK(cli_main({"frobnicate"}, out, err) == 2);
  CHECK(cli_main({"sample", "--nonsense"}, out, err) == 2);
  CHECK(cli_main({"compare", "--config", "/nonexistent.json"}, out, err) == 1);
  CHECK(cli_main({"--help"}, out, err) == 0);
}

TEST_CASE("cli: stein-check prints a residual table") {
  std::ostringstream out, err;
  REQUIRE(cli_main({"stein-check", "--target", "gaussian:d=2", "--n", "1000",
                    "--n", "5000", "--grid-side", "3", "--seed", "5"},
                   out, err) == 0);
  CHECK(out.str().find("max |g|") != std::string::npos);
  CHECK(out.str().find("median ratio") != std::string::npos);
}

}  // TEST_SUITE
