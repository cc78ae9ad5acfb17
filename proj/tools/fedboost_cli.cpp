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
#include <CLI11.hpp>
#include <cstdio>
#include <string>
#include <vector>

#include "fedboost/errors.hpp"
#include "fedboost/experiment.hpp"

namespace {

using fedboost::ExperimentConfig;

void add_dataset_flags(CLI::App* cmd, ExperimentConfig& cfg) {
  cmd->add_option("--dataset", cfg.dataset_path, "Dataset path");
  cmd->add_option("--format", cfg.dataset_format, "libsvm|csv|mnist|synth")
      ->default_val(cfg.dataset_format);
  cmd->add_option("--label-column", cfg.csv_label_column, "CSV label column name");
  cmd->add_option("--mnist-labels", cfg.mnist_labels_path, "IDX label file (mnist format)");
  cmd->add_option("--max-rows", cfg.max_rows, "Subsample the dataset to this many rows");
  cmd->add_option("--test-fraction", cfg.test_fraction, "Held-out fraction for evaluation");
}

void add_experiment_flags(CLI::App* cmd, ExperimentConfig& cfg) {
  add_dataset_flags(cmd, cfg);
  cmd->add_option("--users,-n", cfg.n_users, "Number of users")->default_val(cfg.n_users);
  cmd->add_option("--standby", cfg.standby_users, "Standby replacement pool size");
  cmd->add_option("--threshold,-t", cfg.threshold_t,
                  "Share recovery threshold (0 = 0.6*n default)");
  cmd->add_option("--sec-param", cfg.sec_param, "Modulus bit length (toy presets 16/64/128; 512)")
      ->default_val(cfg.sec_param);
  cmd->add_option("--frac-bits", cfg.frac_bits, "Fixed-point fraction bits")
      ->default_val(cfg.frac_bits);
  cmd->add_flag("--amortize-sharing{false}", cfg.reshare_per_tree,
                "Share mask keys once instead of per tree");
  cmd->add_option("--rounds,-K", cfg.rounds, "Boosting rounds")->default_val(cfg.rounds);
  cmd->add_option("--max-depth", cfg.max_depth, "Tree depth limit")->default_val(cfg.max_depth);
  cmd->add_option("--lambda", cfg.lambda, "L2 regularization");
  cmd->add_option("--gamma", cfg.gamma, "Minimum split gain");
  cmd->add_option("--eta", cfg.eta, "Learning rate");
  cmd->add_option("--min-child-hessian", cfg.min_child_hessian, "Minimum child hessian");
  cmd->add_option("--bins", cfg.bins, "Candidate thresholds per feature")->default_val(cfg.bins);
  cmd->add_option("--feature-subsample", cfg.feature_subsample, "Feature subsample ratio");
  cmd->add_option("--base-score", cfg.base_score, "Initial prediction margin");
  cmd->add_option("--dropout-period", cfg.dropout_period, "Rounds between dropout events");
  cmd->add_option("--dropout-rate", cfg.dropout_rate, "Fraction of users dropped per event");
  cmd->add_flag("--dropout-permanent", cfg.dropout_permanent, "Dropped users never rejoin");
  cmd->add_option("--drop-phase", cfg.drop_phase, "sharing|aggregation|reveal");
  cmd->add_option("--seed", cfg.seed, "Master random seed")->default_val(cfg.seed);
  cmd->add_option("--out,-o", cfg.out_dir, "Output directory")->default_val(cfg.out_dir);
  cmd->set_config("--config", "", "Read options from a key=value file");
}

std::vector<uint32_t> parse_range(const std::string& text) {
  // "10:100:10" (lo:hi:step) or "5,20,50"
  std::vector<uint32_t> out;
  if (text.find(':') != std::string::npos) {
    uint32_t lo = 0, hi = 0, step = 1;
    if (std::sscanf(text.c_str(), "%u:%u:%u", &lo, &hi, &step) < 2 || step == 0) {
      throw CLI::ValidationError("range", "expected lo:hi[:step]");
    }
    for (uint32_t v = lo; v <= hi; v += step) out.push_back(v);
    return out;
  }
  size_t pos = 0;
  while (pos < text.size()) {
    size_t comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    out.push_back(static_cast<uint32_t>(std::stoul(text.substr(pos, comma - pos))));
    pos = comma + 1;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Federated gradient boosting simulator with dropout-tolerant secure aggregation"};
  app.require_subcommand(1);

  ExperimentConfig cfg;
  std::string n_range = "10:100:10";
  std::string m_range = "500";
  std::string rate_list = "0,0.1,0.2,0.3";
  size_t gen_rows = 2000;
  std::string gen_out = "census.libsvm";

  CLI::App* train = app.add_subcommand("train", "Federated training run");
  add_experiment_flags(train, cfg);
  CLI::App* compare = app.add_subcommand("compare", "Paired federated vs centralized run");
  add_experiment_flags(compare, cfg);
  CLI::App* bench =
      app.add_subcommand("secagg-bench", "Secure aggregation sweep over users/input size/dropout");
  add_experiment_flags(bench, cfg);
  bench->add_option("--n-range", n_range, "User counts: lo:hi:step or comma list");
  bench->add_option("--m-range", m_range, "Input sizes: lo:hi:step or comma list");
  bench->add_option("--rates", rate_list, "Dropout rates, comma list");
  CLI::App* keygen = app.add_subcommand("keygen", "Generate and store group parameters");
  add_experiment_flags(keygen, cfg);
  CLI::App* gen = app.add_subcommand("gen-data", "Write a synthetic census-like libsvm dataset");
  gen->add_option("--rows", gen_rows, "Row count")->default_val(gen_rows);
  gen->add_option("--seed", cfg.seed, "Generator seed");
  gen->add_option("--out,-o", gen_out, "Output libsvm path")->default_val(gen_out);

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) {
      cfg.validate();
      fedboost::Dataset data = fedboost::load_dataset(cfg);
      fedboost::RunReport report = fedboost::run_train(cfg, data);
      std::printf("trained %u rounds, final accuracy %.4f (outputs in %s)\n", cfg.rounds,
                  report.final_accuracy, cfg.out_dir.c_str());
      if (cfg.rounds > 0 && report.aborted_rounds == cfg.rounds) {
        std::fprintf(stderr, "error: every round aborted (too many dropouts for t=%u)\n",
                     cfg.effective_threshold());
        return 3;
      }
      if (report.aborted_rounds > 0) {
        std::printf("note: %u round(s) aborted and were truncated\n", report.aborted_rounds);
      }
    } else if (compare->parsed()) {
      cfg.validate();
      fedboost::Dataset data = fedboost::load_dataset(cfg);
      fedboost::CompareReport report = fedboost::run_compare(cfg, data);
      std::printf("federated %.4f vs centralized %.4f | delta %.3f pp | dumps %s\n",
                  report.federated_accuracy, report.centralized_accuracy, report.delta_pp,
                  report.dumps_identical ? "identical" : "differ");
    } else if (bench->parsed()) {
      cfg.validate();
      fedboost::SweepSpec spec;
      spec.n_values = parse_range(n_range);
      spec.m_values = parse_range(m_range);
      for (const std::string& tok : CLI::detail::split(rate_list, ',')) {
        spec.dropout_rates.push_back(std::stod(tok));
      }
      std::vector<fedboost::SweepRow> rows = fedboost::run_secagg_bench(cfg, spec);
      size_t aborted = 0;
      for (const auto& r : rows) aborted += r.ok ? 0 : 1;
      std::printf("sweep: %zu cells (%zu aborted) -> %s/sweep.csv\n", rows.size(), aborted,
                  cfg.out_dir.c_str());
    } else if (keygen->parsed()) {
      std::string path = fedboost::run_keygen(cfg);
      std::printf("group parameters written to %s\n", path.c_str());
    } else if (gen->parsed()) {
      fedboost::Dataset data = fedboost::generate_census_like(gen_rows, cfg.seed);
      fedboost::save_libsvm(data, gen_out);
      std::printf("wrote %zu rows to %s\n", data.rows.size(), gen_out.c_str());
    }
  } catch (const fedboost::DomainError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
