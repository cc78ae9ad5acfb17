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
#pragma once

#include <string>
#include <vector>

#include "fedboost/data_io.hpp"
#include "fedboost/fed_protocol.hpp"

namespace fedboost {

/// Everything a run needs; mirrored 1:1 by CLI flags and the config file.
struct ExperimentConfig {
  std::string dataset_path;
  std::string dataset_format = "libsvm";  // libsvm | csv | mnist | synth
  std::string csv_label_column = "label";
  std::string mnist_labels_path;
  size_t max_rows = 0;  // 0 = all; otherwise a seeded subsample
  double test_fraction = 0.0;

  uint32_t n_users = 4;
  uint32_t standby_users = 0;
  uint32_t threshold_t = 0;  // 0 derives max(1, floor(0.6 n))
  unsigned sec_param = 128;
  unsigned frac_bits = 40;
  bool reshare_per_tree = true;

  unsigned rounds = 10;
  unsigned max_depth = 3;
  double lambda = 1.0;
  double gamma = 0.0;
  double eta = 0.3;
  double min_child_hessian = 1.0;
  unsigned bins = 16;
  double feature_subsample = 1.0;
  double base_score = 0.0;

  unsigned dropout_period = 10;
  double dropout_rate = 0.0;
  bool dropout_permanent = false;
  std::string drop_phase = "aggregation";  // sharing | aggregation | reveal

  uint64_t seed = 1;
  std::string out_dir = "out";

  uint32_t effective_threshold() const;
  void validate() const;  // usage errors before any work
  ProtocolConfig protocol() const;
  TrainConfig train_config() const;
};

/// Canonical key=value echo; its SHA-256 prefix stamps every CSV.
std::string config_echo(const ExperimentConfig& cfg);
std::string config_hash(const ExperimentConfig& cfg);

Dataset load_dataset(const ExperimentConfig& cfg);

struct RunReport {
  std::vector<double> accuracy;
  std::vector<double> loss;
  double final_accuracy = 0.0;
  unsigned aborted_rounds = 0;
  std::string model_dump;
};

/// Federated training run; writes accuracy.csv, metrics.csv, model.txt.
RunReport run_train(const ExperimentConfig& cfg, const Dataset& data);

struct CompareReport {
  double federated_accuracy = 0.0;
  double centralized_accuracy = 0.0;
  double delta_pp = 0.0;  // |difference| in percentage points
  bool dumps_identical = false;
  unsigned aborted_rounds = 0;
};

/// Paired federated/centralized run with shared seed and bins; writes the
/// train outputs plus compare.csv and model_centralized.txt.
CompareReport run_compare(const ExperimentConfig& cfg, const Dataset& data);

struct SweepSpec {
  std::vector<uint32_t> n_values;
  std::vector<uint32_t> m_values;
  std::vector<double> dropout_rates;
};

struct SweepRow {
  uint32_t n = 0;
  uint32_t m = 0;
  double rate = 0.0;
  bool ok = false;
  double user_bytes_sent = 0.0;  // mean over surviving users
  double user_bytes_recv = 0.0;
  uint64_t server_bytes_sent = 0;
  uint64_t server_bytes_recv = 0;
  double user_cpu_ms = 0.0;
  double server_cpu_ms = 0.0;
};

/// Aggregation-only grid (one full SecAgg round per cell, mask key sharing
/// included); writes sweep.csv when out_dir is set.
std::vector<SweepRow> run_secagg_bench(const ExperimentConfig& cfg, const SweepSpec& spec);

/// Generates GroupParams for the configured sec_param/seed and writes
/// group_params.bin (full, key-center form).
std::string run_keygen(const ExperimentConfig& cfg);

}  // namespace fedboost
