// Experiment orchestration: config validation and echo, CSV/JSON artifacts,
// byte-level reproducibility, and worker-count invariance.
#include <doctest.h>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "oracle_values.hpp"
#include "rplab/experiment.hpp"

using namespace rplab;
namespace fs = std::filesystem;
namespace orc = rplab::oracle;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& leaf) {
  return fs::temp_directory_path() / ("rplab_ut_" + leaf);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string cell;
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

bool has_violation(const std::vector<ConfigViolation>& v,
                   const std::string& field) {
  return std::any_of(v.begin(), v.end(), [&](const ConfigViolation& c) {
    return c.field == field;
  });
}

}  // namespace

TEST_SUITE("experiment") {

TEST_CASE("kind names round-trip") {
  for (ExperimentKind k :
       {ExperimentKind::PotentialStats, ExperimentKind::Survival,
        ExperimentKind::Lyapunov, ExperimentKind::Shape, ExperimentKind::Rate,
        ExperimentKind::Phase, ExperimentKind::Eigen, ExperimentKind::LdpCheck})
    CHECK(experiment_kind_from_name(experiment_kind_name(k)) == k);
  CHECK_THROWS_AS(experiment_kind_from_name("bogus"), std::invalid_argument);
}

TEST_CASE("list and vector parsing") {
  const std::vector<double> xs = parse_double_list("1,2.5,3e-1");
  REQUIRE(xs.size() == 3);
  CHECK(xs[0] == 1.0);
  CHECK(xs[1] == 2.5);
  CHECK(xs[2] == doctest::Approx(0.3));
  CHECK_THROWS_AS(parse_double_list("1,x"), std::invalid_argument);
  CHECK_THROWS_AS(parse_double_list("1,2q"), std::invalid_argument);
  CHECK_THROWS_AS(parse_double_list(""), std::invalid_argument);
  CHECK_THROWS_AS(parse_double_list("1,,2"), std::invalid_argument);
  const Vec v = parse_vec("1,-2", 2);
  CHECK(v[0] == 1.0);
  CHECK(v[1] == -2.0);
  CHECK(v[2] == 0.0);
  CHECK_THROWS_AS(parse_vec("1,2,3", 2), std::invalid_argument);
}

TEST_CASE("validation tags the offending fields") {
  ExperimentConfig ok;
  ok.potential = PotentialSpec::zero(1);
  CHECK(validate(ok).empty());

  ExperimentConfig bad_dt = ok;
  bad_dt.path.dt = 5.0;
  bad_dt.path.t_max = 2.0;
  CHECK(has_violation(validate(bad_dt), "dt"));

  ExperimentConfig bad_fam = ok;
  bad_fam.potential = PotentialSpec::ruess(0.5, 3.0, 2.0, 0.4);
  CHECK(has_violation(validate(bad_fam), "family"));
  bad_fam.potential = PotentialSpec::lacoin(2, 0.4, 1.5);
  CHECK(has_violation(validate(bad_fam), "family"));

  ExperimentConfig bad_mesh = ok;
  bad_mesh.kind = ExperimentKind::Eigen;
  bad_mesh.mesh_h = 0.2;
  CHECK(has_violation(validate(bad_mesh), "mesh-h"));

  ExperimentConfig bad_scales = ok;
  bad_scales.kind = ExperimentKind::Lyapunov;
  bad_scales.scales = {2.0, 4.0, 8.0};
  CHECK(has_violation(validate(bad_scales), "scales"));
  bad_scales.scales = {4.0, 8.0};
  bad_scales.x = vec0();
  CHECK(has_violation(validate(bad_scales), "x"));

  ExperimentConfig bad_h = ok;
  bad_h.kind = ExperimentKind::Phase;
  bad_h.h_vec = vec0();
  CHECK(has_violation(validate(bad_h), "h-vec"));

  ExperimentConfig bad_grid = ok;
  bad_grid.kind = ExperimentKind::Survival;
  bad_grid.t_grid = {2.0, 1.0};
  CHECK(has_violation(validate(bad_grid), "t-grid"));

  ExperimentConfig bad_ball = ok;
  bad_ball.kind = ExperimentKind::LdpCheck;
  bad_ball.ball_radius = 0.0;
  CHECK(has_violation(validate(bad_ball), "ball-radius"));

  ExperimentConfig bad_counts = ok;
  bad_counts.n_env = 0;
  bad_counts.n_bootstrap = 1;
  const auto v = validate(bad_counts);
  CHECK(has_violation(v, "n-env"));
  CHECK(has_violation(v, "n-bootstrap"));
}

TEST_CASE("config echo is canonical") {
  ExperimentConfig cfg;
  cfg.potential = PotentialSpec::lacoin(2, 3.0, 1.5);
  const std::string echo = config_echo(cfg);
  CHECK(echo == config_echo(cfg));
  const auto ls = lines_of(echo);
  REQUIRE(ls.size() > 10);
  std::vector<std::string> keys;
  for (const auto& l : ls) keys.push_back(l.substr(0, l.find('=')));
  CHECK(std::is_sorted(keys.begin(), keys.end()));
  CHECK(ls.front().rfind("ball-radius=", 0) == 0);
  bool has_seed = false;
  for (const auto& l : ls) has_seed = has_seed || l == "seed=1";
  CHECK(has_seed);
  ExperimentConfig other = cfg;
  other.seed = 2;
  CHECK(config_echo(other) != echo);
}

TEST_CASE("potential-stats artifacts and closed forms") {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::PotentialStats;
  cfg.potential = PotentialSpec::lacoin(2, 3.0, 1.5);
  cfg.n_env = 250;
  cfg.seed = 42;
  cfg.out_dir = scratch("pstats").string();
  fs::remove_all(cfg.out_dir);
  REQUIRE(validate(cfg).empty());
  const auto artifacts = run(cfg);
  for (const char* name :
       {"potential_stats.csv", "cloud.csv", "cloud.json", "manifest.json"}) {
    CHECK(std::count(artifacts.begin(), artifacts.end(), name) == 1);
    CHECK(fs::exists(fs::path(cfg.out_dir) / name));
  }

  const auto ls = lines_of(slurp(fs::path(cfg.out_dir) / "potential_stats.csv"));
  REQUIRE(ls.size() == 3);
  CHECK(ls[0] == "stat,empirical,closed_form,stderr,n_env");
  const auto mean_row = split_csv(ls[1]);
  const auto var_row = split_csv(ls[2]);
  REQUIRE(mean_row.size() == 5);
  CHECK(mean_row[0] == "mean");
  CHECK(std::stod(mean_row[2]) ==
        doctest::Approx(orc::kBallMean_d2_g3_d15).epsilon(1e-9));
  CHECK(std::fabs(std::stod(mean_row[1]) - orc::kBallMean_d2_g3_d15) <
        6.0 * std::stod(mean_row[3]));
  CHECK(var_row[0] == "variance");
  CHECK(std::stod(var_row[2]) ==
        doctest::Approx(orc::kBallVar_d2_g3_d15).epsilon(1e-9));

  const json side = json::parse(slurp(fs::path(cfg.out_dir) / "cloud.json"));
  CHECK(side["family"] == "lacoin");
  CHECK(side["window_radius"].get<double>() == 1.0);
  CHECK(side["truncation"]["mark_cutoff"].get<double>() > 1.0);

  const json manifest =
      json::parse(slurp(fs::path(cfg.out_dir) / "manifest.json"));
  CHECK(manifest["kind"] == "potential-stats");
  CHECK(manifest["config"]["family"] == "lacoin");
  const std::string hash = manifest["content_hash"].get<std::string>();
  CHECK(hash.rfind("fnv1a64:", 0) == 0);
  CHECK(hash.size() == 8 + 16);
}

TEST_CASE("flat families skip the cloud artifacts") {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::PotentialStats;
  cfg.potential = PotentialSpec::zero(2);
  cfg.n_env = 20;
  cfg.out_dir = scratch("pstats_zero").string();
  fs::remove_all(cfg.out_dir);
  const auto artifacts = run(cfg);
  CHECK(std::count(artifacts.begin(), artifacts.end(), "cloud.csv") == 0);
  const auto ls = lines_of(slurp(fs::path(cfg.out_dir) / "potential_stats.csv"));
  const auto mean_row = split_csv(ls[1]);
  CHECK(std::stod(mean_row[1]) == 0.0);
  CHECK(std::stod(mean_row[2]) == 0.0);
}

TEST_CASE("eigen experiment with a short R grid takes the direct path") {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::Eigen;
  cfg.potential = PotentialSpec::zero(1);
  cfg.R_grid = {1.0};
  cfg.mesh_h = 1.0 / 32;
  cfg.n_env = 2;
  cfg.out_dir = scratch("eigen").string();
  fs::remove_all(cfg.out_dir);
  REQUIRE(validate(cfg).empty());
  run(cfg);
  const auto ls = lines_of(slurp(fs::path(cfg.out_dir) / "spectrum.csv"));
  REQUIRE(ls.size() == 3);  // header + 2 environments x 1 radius
  CHECK(ls[0] == "env_seed,R,h,lambda_hat,residual,iters");
  for (int r = 1; r <= 2; ++r) {
    const auto row = split_csv(ls[r]);
    REQUIRE(row.size() == 6);
    CHECK(std::stod(row[3]) ==
          doctest::Approx(orc::kEig_d1_continuum).epsilon(2e-3));
  }
  const json j = json::parse(slurp(fs::path(cfg.out_dir) / "eigen.json"));
  REQUIRE(j["mean_by_R"].size() == 1);
  CHECK(j["mean_by_R"][0].get<double>() ==
        doctest::Approx(orc::kEig_d1_continuum).epsilon(2e-3));
}

TEST_CASE("reruns are byte-identical and hashes agree") {
  auto make = [&](const std::string& leaf) {
    ExperimentConfig cfg;
    cfg.kind = ExperimentKind::Survival;
    cfg.potential = PotentialSpec::zero(2);
    cfg.path.dt = 1e-2;
    cfg.t_grid = {1.0, 2.0, 3.0, 4.0};
    cfg.n_paths = 400;
    cfg.dump_paths = 2;
    cfg.seed = 7;
    cfg.out_dir = scratch(leaf).string();
    fs::remove_all(cfg.out_dir);
    return cfg;
  };
  const ExperimentConfig a = make("surv_a");
  const ExperimentConfig b = make("surv_b");
  run(a);
  run(b);
  CHECK(slurp(fs::path(a.out_dir) / "survival.csv") ==
        slurp(fs::path(b.out_dir) / "survival.csv"));
  CHECK(slurp(fs::path(a.out_dir) / "trajectories.bin") ==
        slurp(fs::path(b.out_dir) / "trajectories.bin"));
  const long expect_bytes = 2L * 401 * 2 * 8;  // paths x records x dims x f64
  CHECK(static_cast<long>(
            fs::file_size(fs::path(a.out_dir) / "trajectories.bin")) ==
        expect_bytes);

  const json ma = json::parse(slurp(fs::path(a.out_dir) / "manifest.json"));
  const json mb = json::parse(slurp(fs::path(b.out_dir) / "manifest.json"));
  // Hashes cover the config; out_dir differs, so hashes must differ, while
  // everything else in the echo agrees line by line except the out entry.
  CHECK(ma["config"]["seed"] == mb["config"]["seed"]);
  CHECK(ma["config"]["out"] != mb["config"]["out"]);

  const json fit = json::parse(slurp(fs::path(a.out_dir) / "survival_fit.json"));
  CHECK(std::fabs(fit["slope"].get<double>()) < 1e-9);

  // Same out_dir, fresh run: the full manifest hash now matches too.
  const ExperimentConfig c = make("surv_a");
  run(c);
  const json mc = json::parse(slurp(fs::path(a.out_dir) / "manifest.json"));
  CHECK(mc["content_hash"] == ma["content_hash"]);
  CHECK(slurp(fs::path(a.out_dir) / "survival.csv") ==
        slurp(fs::path(b.out_dir) / "survival.csv"));
}

TEST_CASE("worker count does not change the numbers") {
  auto make = [&](const std::string& leaf, int workers) {
    ExperimentConfig cfg;
    cfg.kind = ExperimentKind::Lyapunov;
    cfg.potential = PotentialSpec::zero(1);
    cfg.lambda_grid = {0.5};
    cfg.scales = {4.0, 8.0};
    cfg.n_env = 2;
    cfg.n_paths = 300;
    cfg.path.dt = 1e-2;
    cfg.seed = 5;
    cfg.workers = workers;
    cfg.out_dir = scratch(leaf).string();
    fs::remove_all(cfg.out_dir);
    return cfg;
  };
  const ExperimentConfig w1 = make("lyap_w1", 1);
  const ExperimentConfig w3 = make("lyap_w3", 3);
  REQUIRE(validate(w1).empty());
  run(w1);
  run(w3);
  CHECK(slurp(fs::path(w1.out_dir) / "lyapunov.csv") ==
        slurp(fs::path(w3.out_dir) / "lyapunov.csv"));
  CHECK(slurp(fs::path(w1.out_dir) / "lyapunov.json") ==
        slurp(fs::path(w3.out_dir) / "lyapunov.json"));
  const auto ls = lines_of(slurp(fs::path(w1.out_dir) / "lyapunov.csv"));
  REQUIRE(ls.size() == 3);  // header + 2 scales
  CHECK(ls[0] == "lambda,scale,direction_index,a_over_r,stderr,n_env,n_paths");
}

TEST_CASE("ldp-check artifacts") {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::LdpCheck;
  cfg.potential = PotentialSpec::zero(2);
  cfg.h_vec = vec(0.6, 0.0);
  cfg.ball_radius = 0.3;
  cfg.t_grid = {1.0, 2.0};
  cfg.n_paths = 200;
  cfg.path.dt = 1e-2;
  cfg.out_dir = scratch("ldp").string();
  fs::remove_all(cfg.out_dir);
  REQUIRE(validate(cfg).empty());
  run(cfg);
  const auto ls = lines_of(slurp(fs::path(cfg.out_dir) / "ldp_check.csv"));
  REQUIRE(ls.size() == 3);
  CHECK(ls[0] == "t,rate,numerator,denominator,n_inside,n_paths,env_seed");
  const json j = json::parse(slurp(fs::path(cfg.out_dir) / "ldp_check.json"));
  CHECK(j["final_rate"].get<double>() < 0.0);
  CHECK(j["ball_radius"].get<double>() == 0.3);
}

}  // TEST_SUITE("experiment")
