/*
 * Copyright 2026 the fedboost authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "fedboost/errors.hpp"
#include "fedboost/experiment.hpp"

using namespace fedboost;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

std::string fresh_dir(const std::string& tag) {
  auto dir = std::filesystem::temp_directory_path() / ("fb_exp_" + tag);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir.string();
}

ExperimentConfig toy_config(const std::string& tag) {
  ExperimentConfig cfg;
  cfg.dataset_format = "synth";
  cfg.max_rows = 80;
  cfg.n_users = 4;
  cfg.sec_param = 64;
  cfg.frac_bits = 40;  // equivalence needs codec noise well under the dump quantum
  cfg.rounds = 3;
  cfg.max_depth = 2;
  cfg.bins = 8;
  cfg.feature_subsample = 0.25;
  cfg.test_fraction = 0.25;
  cfg.seed = 5;
  cfg.out_dir = fresh_dir(tag);
  return cfg;
}

}  // namespace

TEST_CASE("config validation fires before any work") {
  ExperimentConfig cfg = toy_config("validate");
  cfg.threshold_t = 9;  // > n_users
  Dataset data = load_dataset(cfg);
  CHECK_THROWS_AS(run_train(cfg, data), DomainError);
  cfg.threshold_t = 0;
  cfg.dropout_rate = 1.5;
  CHECK_THROWS_AS(run_train(cfg, data), DomainError);
  cfg.dropout_rate = 0;
  cfg.drop_phase = "sometimes";
  CHECK_THROWS_AS(run_train(cfg, data), DomainError);
}

TEST_CASE("threshold defaults to 0.6 n") {
  ExperimentConfig cfg;
  cfg.n_users = 10;
  CHECK(cfg.effective_threshold() == 6);
  cfg.n_users = 1;
  CHECK(cfg.effective_threshold() == 1);
  cfg.threshold_t = 3;
  CHECK(cfg.effective_threshold() == 3);
}

TEST_CASE("train writes the declared outputs and reruns byte-identically") {
  ExperimentConfig cfg = toy_config("train1");
  Dataset data = load_dataset(cfg);
  RunReport report = run_train(cfg, data);
  CHECK(report.accuracy.size() == cfg.rounds);
  CHECK(report.aborted_rounds == 0);
  std::string acc1 = slurp(cfg.out_dir + "/accuracy.csv");
  std::string met1 = slurp(cfg.out_dir + "/metrics.csv");
  std::string model1 = slurp(cfg.out_dir + "/model.txt");
  CHECK(acc1.rfind("# config=", 0) == 0);
  CHECK(met1.find("run_id,round,entity,kind,bytes_sent,bytes_recv,cpu_ms") != std::string::npos);

  ExperimentConfig cfg2 = cfg;
  cfg2.out_dir = fresh_dir("train2");
  run_train(cfg2, data);
  CHECK(slurp(cfg2.out_dir + "/accuracy.csv") == acc1);
  CHECK(slurp(cfg2.out_dir + "/metrics.csv") == met1);
  CHECK(slurp(cfg2.out_dir + "/model.txt") == model1);
}

TEST_CASE("compare with zero rounds has exactly zero delta") {
  ExperimentConfig cfg = toy_config("cmp0");
  cfg.rounds = 0;
  Dataset data = load_dataset(cfg);
  CompareReport report = run_compare(cfg, data);
  CHECK(report.delta_pp == 0.0);
  CHECK(report.dumps_identical);
}

TEST_CASE("compare without dropout matches the centralized oracle") {
  ExperimentConfig cfg = toy_config("cmp1");
  Dataset data = load_dataset(cfg);
  CompareReport report = run_compare(cfg, data);
  CHECK(report.dumps_identical);
  CHECK(report.delta_pp <= 1.0);
  CHECK(std::filesystem::exists(cfg.out_dir + "/compare.csv"));
  CHECK(std::filesystem::exists(cfg.out_dir + "/model_centralized.txt"));
}

TEST_CASE("compare under dropout still completes and reports a delta") {
  ExperimentConfig cfg = toy_config("cmp2");
  cfg.n_users = 5;
  cfg.rounds = 4;
  cfg.dropout_period = 2;
  cfg.dropout_rate = 0.3;
  Dataset data = load_dataset(cfg);
  CompareReport report = run_compare(cfg, data);
  CHECK(report.aborted_rounds == 0);
  CHECK(report.delta_pp >= 0.0);
}

TEST_CASE("secagg bench sweeps cells and flags infeasible ones") {
  ExperimentConfig cfg = toy_config("bench");
  cfg.sec_param = 64;
  cfg.frac_bits = 20;
  SweepSpec spec;
  spec.n_values = {4, 8};
  spec.m_values = {5};
  spec.dropout_rates = {0.0, 0.75};
  std::vector<SweepRow> rows = run_secagg_bench(cfg, spec);
  REQUIRE(rows.size() == 4);
  // rate 0 cells succeed; 0.75 exceeds n - t and aborts.
  for (const SweepRow& r : rows) {
    if (r.rate == 0.0) {
      CHECK(r.ok);
      CHECK(r.user_bytes_sent > 0);
      CHECK(r.server_bytes_recv > 0);
    } else {
      CHECK_FALSE(r.ok);
    }
  }
  // Server traffic grows with the user count.
  CHECK(rows[2].server_bytes_recv > rows[0].server_bytes_recv);
  CHECK(std::filesystem::exists(cfg.out_dir + "/sweep.csv"));

  std::string csv1 = slurp(cfg.out_dir + "/sweep.csv");
  cfg.out_dir = fresh_dir("bench2");
  run_secagg_bench(cfg, spec);
  CHECK(slurp(cfg.out_dir + "/sweep.csv") == csv1);
}

TEST_CASE("keygen emits a loadable parameter file") {
  ExperimentConfig cfg = toy_config("keygen");
  cfg.sec_param = 24;
  std::string path = run_keygen(cfg);
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
  GroupParams gp = GroupParams::deserialize(bytes);
  CHECK(gp.sec_param == 24);
  CHECK(gp.q1 != 0);
}

TEST_CASE("multiclass datasets are rejected by the binary trainer") {
  ExperimentConfig cfg = toy_config("multi");
  Dataset data = load_dataset(cfg);
  data.n_classes = 10;
  CHECK_THROWS_AS(run_train(cfg, data), DomainError);
}

TEST_CASE("config hash is stable and sensitive") {
  ExperimentConfig a = toy_config("hash");
  ExperimentConfig b = a;
  CHECK(config_hash(a) == config_hash(b));
  b.seed += 1;
  CHECK(config_hash(a) != config_hash(b));
}
