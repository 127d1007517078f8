#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <sstream>

#include "lrdemp/checks.hpp"
#include "lrdemp/errors.hpp"
#include "lrdemp/harness.hpp"
#include "lrdemp/stats.hpp"

using namespace lrdemp;
using Catch::Approx;
using nlohmann::json;

namespace {
json small_config() {
  return json::parse(R"({
    "name": "small",
    "process": {"beta": 0.7, "trunc_K": 4096},
    "n_grid": [256, 512, 1024],
    "reps": 50,
    "master_seed": 77,
    "grid_m": 32,
    "estimators": ["mean", "m:huber"],
    "statistics": ["ks_known", "ks", "cvm", "profile", "pointwise"],
    "checks": [{"name": "negligibility", "estimator": "mean", "factor": 0.5},
               {"name": "z1_normality"}]
  })");
}

std::string csv_of(const ExperimentResult& r) {
  std::ostringstream os;
  write_results_csv(os, r);
  return os.str();
}

std::string pointer_of(const json& j) {
  try {
    ExperimentConfig::from_json(j).validate();
  } catch (const ConfigError& e) {
    return e.pointer();
  }
  return "";
}
}  // namespace

TEST_CASE("negligibility verdict", "[checks]") {
  CHECK(check_negligibility(std::vector<double>{1.0, 0.7, 0.4}).pass);
  CHECK_FALSE(check_negligibility(std::vector<double>{1.0, 1.0, 1.0}).pass);
  CHECK_FALSE(check_negligibility(std::vector<double>{1.0, 0.9, 0.8}).pass);
  CHECK_THROWS_AS(check_negligibility(std::vector<double>{1.0, 0.2}), ParameterError);
}

TEST_CASE("profile regressions", "[checks]") {
  const MarginalModel m(1.0, 0.0, 1.0);
  std::vector<double> f1, f0, scaled, density, mixed;
  std::mt19937_64 rng(3);
  std::normal_distribution<double> noise(0.0, 1e-3);
  for (int g = 1; g <= 64; ++g) {
    const double x = m.quantile(g / 65.0);
    f1.push_back(m.pdf_derivative(1, x));
    f0.push_back(m.pdf(x));
    scaled.push_back(3.7 * f1.back());
    density.push_back(f0.back());
    mixed.push_back(2.0 * f1.back() + f0.back() + noise(rng));
  }
  const auto exact = profile_regression(scaled, f1);
  CHECK(exact.slope == Approx(3.7));
  CHECK(exact.r_squared == Approx(1.0));
  CHECK(profile_regression(density, f1).r_squared < 0.5);
  const auto two = two_component_regression(mixed, f1, f0);
  CHECK(two.coef_f0 == Approx(1.0).epsilon(0.05));
  CHECK(two.coef_f1 == Approx(2.0).epsilon(0.05));

  const std::vector<double> r2{0.95, 0.97}, slopes{1.0, 2.0, 3.0}, v{1.1, 2.0, 2.9};
  CHECK(check_profile_proportionality(r2, slopes, v).pass);
  const std::vector<double> low{0.5, 0.6};
  CHECK_FALSE(check_profile_proportionality(low, slopes, v).pass);
}

TEST_CASE("normality screen and gaussian regime", "[checks]") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> z;
  std::vector<double> gauss(2000), chi(2000);
  for (std::size_t i = 0; i < gauss.size(); ++i) {
    gauss[i] = z(rng);
    const double w = z(rng);
    chi[i] = w * w;
  }
  CHECK(normality_screen(gauss).pass);
  CHECK_FALSE(normality_screen(chi).pass);
  CHECK(check_gaussian_regime({gauss}, {gauss}).pass);
  CHECK_FALSE(check_gaussian_regime({gauss}, {chi}).pass);
}

TEST_CASE("rate and variance verdicts", "[checks]") {
  const std::vector<double> ns{1024, 2048, 4096, 8192};
  std::vector<double> halving;
  for (double n : ns) halving.push_back(1.0 / std::sqrt(n));
  CHECK(check_reduction_rate(ns, halving).pass);
  CHECK(check_reduction_rate(ns, halving).measured == Approx(-0.5));
  CHECK_FALSE(check_reduction_rate(ns, std::vector<double>(4, 1.0)).pass);

  std::mt19937_64 rng(2);
  std::normal_distribution<double> z;
  std::vector<double> wide(2000), narrow(2000);
  for (auto& v : wide) v = std::sqrt(2.0) * z(rng);
  for (auto& v : narrow) v = z(rng);
  CHECK(check_variance_inflation(wide, narrow).pass);
  CHECK_FALSE(check_variance_inflation(narrow, wide).pass);
  CHECK(check_standard_normal_moments(narrow).pass);
  CHECK_FALSE(check_standard_normal_moments(wide).pass);
  CHECK(check_replication_independence(narrow).pass);

  CHECK_THROWS_AS(check_m_estimator_branch(SecondOrderRank::rank_2, SecondOrderRank::rank_gt_2, narrow),
                  ConsistencyError);
  CHECK(check_m_estimator_branch(SecondOrderRank::rank_gt_2, SecondOrderRank::rank_gt_2, narrow).pass);
}

TEST_CASE("verdict JSON writes null for non-finite values", "[checks]") {
  Verdict v = named("x");
  v.measured = NAN;
  CHECK(to_json(v)["measured"].is_null());
}

TEST_CASE("config validation reports the offending field", "[harness]") {
  auto j = small_config();
  CHECK(pointer_of(j).empty());
  j["reps"] = 10;
  CHECK(pointer_of(j) == "/reps");
  j = small_config();
  j["statistics"] = json::array();
  CHECK(pointer_of(j) == "/statistics");
  j = small_config();
  j["checks"][0]["name"] = "nonsense";
  CHECK(pointer_of(j).rfind("/checks", 0) == 0);
  j = small_config();
  j["process"]["beta"] = 0.75;
  CHECK(pointer_of(j) == "/process/beta");
  j = small_config();
  j["unexpected"] = 1;
  CHECK_FALSE(pointer_of(j).empty());
  j = small_config();
  j["n_grid"] = json::array({512, 256, 1024});
  CHECK(pointer_of(j).rfind("/n_grid", 0) == 0);

  const auto a = ExperimentConfig::from_json(small_config());
  CHECK(ExperimentConfig::from_json(a.to_json()).hash() == a.hash());
}

TEST_CASE("experiments are deterministic across thread counts", "[harness][mc]") {
  const auto cfg = ExperimentConfig::from_json(small_config());
  const auto serial = run_experiment(cfg, 1);
  const auto parallel = run_experiment(cfg, 4);
  CHECK(serial.records.size() == 150);
  CHECK(serial.failed_records() == 0);
  CHECK(csv_of(serial) == csv_of(parallel));
  CHECK(verdicts_json(serial, "t").dump() == verdicts_json(parallel, "t").dump());
  CHECK(serial.at(512).size() == 50);

  auto other_cfg = cfg;
  other_cfg.master_seed = 78;
  const auto other = run_experiment(other_cfg, 0);
  std::vector<double> za, zb;
  for (const auto* r : serial.at(1024)) za.push_back(r->proxies.z1);
  for (const auto* r : other.at(1024)) zb.push_back(r->proxies.z1);
  CHECK(za != zb);
  // Same law under both seeds.
  CHECK(stats::ks_distance(za, zb) < 0.4);
}
