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
#include "fedboost/experiment.hpp"

#include <openssl/sha.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "fedboost/errors.hpp"

namespace fedboost {

namespace {

std::string fmt(const char* format, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

std::string entity_name(uint32_t id) {
  if (id == kServerId) return "server";
  if (id == kCenterId) return "center";
  return "user_" + std::to_string(id);
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write " + path);
  out << content;
}

std::string metrics_csv(const RoundMetrics& metrics, const std::string& run_id) {
  std::string out = "# config=" + run_id + "\n";
  out += "run_id,round,entity,kind,bytes_sent,bytes_recv,cpu_ms\n";
  for (const auto& [key, c] : metrics.traffic) {
    auto [round, entity, kind] = key;
    out += fmt("%s,%u,%s,%s,%llu,%llu,0.000\n", run_id.c_str(), round,
               entity_name(entity).c_str(), msg_kind_name(kind),
               static_cast<unsigned long long>(c.bytes_sent),
               static_cast<unsigned long long>(c.bytes_recv));
  }
  // Per-round entity totals carry the virtual cpu time.
  std::map<std::pair<uint32_t, uint32_t>, KindCounters> totals;
  for (const auto& [key, c] : metrics.traffic) {
    KindCounters& t = totals[{std::get<0>(key), std::get<1>(key)}];
    t.bytes_sent += c.bytes_sent;
    t.bytes_recv += c.bytes_recv;
  }
  for (const auto& [key, t] : totals) {
    double ms = 0.0;
    if (auto it = metrics.cpu_ms.find(key); it != metrics.cpu_ms.end()) ms = it->second;
    out += fmt("%s,%u,%s,total,%llu,%llu,%.3f\n", run_id.c_str(), key.first,
               entity_name(key.second).c_str(), static_cast<unsigned long long>(t.bytes_sent),
               static_cast<unsigned long long>(t.bytes_recv), ms);
  }
  return out;
}

std::string accuracy_csv(const TrainLog& log, const std::string& run_id) {
  std::string out = "# config=" + run_id + "\n";
  out += "round,accuracy,loss\n";
  for (size_t i = 0; i < log.accuracy.size(); ++i) {
    out += fmt("%zu,%.17g,%.17g\n", i + 1, log.accuracy[i], log.loss[i]);
  }
  return out;
}

struct PreparedData {
  std::vector<size_t> train_ids;
  std::vector<SparseRow> eval_rows;
  std::vector<int> eval_labels;
  Partition shards;
};

PreparedData prepare(const ExperimentConfig& cfg, const Dataset& data) {
  PreparedData prep;
  Rng root(cfg.seed);
  std::vector<size_t> test_ids;
  if (cfg.test_fraction > 0) {
    Rng split_rng = root.fork("split");
    auto [train_ids, tids] = train_test_split(data.rows.size(), cfg.test_fraction, split_rng);
    prep.train_ids = std::move(train_ids);
    test_ids = std::move(tids);
  } else {
    prep.train_ids.resize(data.rows.size());
    for (size_t i = 0; i < data.rows.size(); ++i) prep.train_ids[i] = i;
  }
  const std::vector<size_t>& eval_ids = cfg.test_fraction > 0 ? test_ids : prep.train_ids;
  for (size_t i : eval_ids) {
    prep.eval_rows.push_back(data.rows[i]);
    prep.eval_labels.push_back(data.labels[i]);
  }
  Rng part_rng = root.fork("partition");
  Partition relative = partition(prep.train_ids.size(), cfg.n_users + cfg.standby_users, part_rng);
  for (const auto& [user, ids] : relative) {
    std::vector<size_t>& shard = prep.shards[user];
    shard.reserve(ids.size());
    for (size_t i : ids) shard.push_back(prep.train_ids[i]);
  }
  return prep;
}

std::vector<SparseRow> gather_rows(const Dataset& data, std::span<const size_t> ids) {
  std::vector<SparseRow> rows;
  rows.reserve(ids.size());
  for (size_t i : ids) rows.push_back(data.rows[i]);
  return rows;
}

std::vector<int> gather_labels(const Dataset& data, std::span<const size_t> ids) {
  std::vector<int> labels;
  labels.reserve(ids.size());
  for (size_t i : ids) labels.push_back(data.labels[i]);
  return labels;
}

}  // namespace

uint32_t ExperimentConfig::effective_threshold() const {
  if (threshold_t > 0) return threshold_t;
  uint32_t t = static_cast<uint32_t>(std::floor(0.6 * n_users));
  return std::max<uint32_t>(1, t);
}

void ExperimentConfig::validate() const {
  if (n_users < 1) throw DomainError("config: n_users must be >= 1");
  if (effective_threshold() > n_users) throw DomainError("config: threshold t exceeds n_users");
  if (sec_param < 16) throw DomainError("config: sec_param must be >= 16");
  if (dropout_rate < 0 || dropout_rate >= 1) throw DomainError("config: dropout rate in [0,1)");
  if (test_fraction < 0 || test_fraction >= 1) throw DomainError("config: test fraction in [0,1)");
  if (drop_phase != "sharing" && drop_phase != "aggregation" && drop_phase != "reveal") {
    throw DomainError("config: drop_phase must be sharing|aggregation|reveal");
  }
  if (dataset_format != "libsvm" && dataset_format != "csv" && dataset_format != "mnist" &&
      dataset_format != "synth") {
    throw DomainError("config: unknown dataset format " + dataset_format);
  }
}

ProtocolConfig ExperimentConfig::protocol() const {
  ProtocolConfig p;
  p.n_users = n_users;
  p.standby_users = standby_users;
  p.threshold_t = effective_threshold();
  p.sec_param = sec_param;
  p.frac_bits = frac_bits;
  p.reshare_per_tree = reshare_per_tree;
  p.train = train_config();
  p.dropout.period = dropout_period;
  p.dropout.rate = dropout_rate;
  p.dropout.permanent = dropout_permanent;
  p.drop_phase = drop_phase == "sharing"      ? DropPhase::Sharing
                 : drop_phase == "reveal"     ? DropPhase::Reveal
                                              : DropPhase::Aggregation;
  return p;
}

TrainConfig ExperimentConfig::train_config() const {
  TrainConfig t;
  t.growth.max_depth = max_depth;
  t.growth.lambda = lambda;
  t.growth.gamma = gamma;
  t.growth.min_child_hessian = min_child_hessian;
  t.growth.bins = bins;
  t.growth.feature_subsample = feature_subsample;
  t.rounds = rounds;
  t.eta = eta;
  t.base_score = base_score;
  return t;
}

std::string config_echo(const ExperimentConfig& cfg) {
  std::string out;
  out += "dataset_path=" + cfg.dataset_path + "\n";
  out += "dataset_format=" + cfg.dataset_format + "\n";
  out += "csv_label_column=" + cfg.csv_label_column + "\n";
  out += "mnist_labels_path=" + cfg.mnist_labels_path + "\n";
  out += fmt("max_rows=%zu\n", cfg.max_rows);
  out += fmt("test_fraction=%.17g\n", cfg.test_fraction);
  out += fmt("n_users=%u\n", cfg.n_users);
  out += fmt("standby_users=%u\n", cfg.standby_users);
  out += fmt("threshold_t=%u\n", cfg.effective_threshold());
  out += fmt("sec_param=%u\n", cfg.sec_param);
  out += fmt("frac_bits=%u\n", cfg.frac_bits);
  out += fmt("reshare_per_tree=%d\n", cfg.reshare_per_tree ? 1 : 0);
  out += fmt("rounds=%u\n", cfg.rounds);
  out += fmt("max_depth=%u\n", cfg.max_depth);
  out += fmt("lambda=%.17g\n", cfg.lambda);
  out += fmt("gamma=%.17g\n", cfg.gamma);
  out += fmt("eta=%.17g\n", cfg.eta);
  out += fmt("min_child_hessian=%.17g\n", cfg.min_child_hessian);
  out += fmt("bins=%u\n", cfg.bins);
  out += fmt("feature_subsample=%.17g\n", cfg.feature_subsample);
  out += fmt("base_score=%.17g\n", cfg.base_score);
  out += fmt("dropout_period=%u\n", cfg.dropout_period);
  out += fmt("dropout_rate=%.17g\n", cfg.dropout_rate);
  out += fmt("dropout_permanent=%d\n", cfg.dropout_permanent ? 1 : 0);
  out += "drop_phase=" + cfg.drop_phase + "\n";
  out += fmt("seed=%llu\n", static_cast<unsigned long long>(cfg.seed));
  return out;
}

std::string config_hash(const ExperimentConfig& cfg) {
  std::string echo = config_echo(cfg);
  uint8_t digest[SHA256_DIGEST_LENGTH];
  SHA256(reinterpret_cast<const uint8_t*>(echo.data()), echo.size(), digest);
  std::string hex;
  for (int i = 0; i < 8; ++i) hex += fmt("%02x", digest[i]);
  return hex;
}

Dataset load_dataset(const ExperimentConfig& cfg) {
  Dataset data;
  if (cfg.dataset_format == "libsvm") {
    data = load_libsvm(cfg.dataset_path);
  } else if (cfg.dataset_format == "csv") {
    data = load_csv(cfg.dataset_path, cfg.csv_label_column);
  } else if (cfg.dataset_format == "mnist") {
    data = load_mnist_idx(cfg.dataset_path, cfg.mnist_labels_path);
  } else if (cfg.dataset_format == "synth") {
    size_t rows = cfg.max_rows > 0 ? cfg.max_rows : 2000;
    return generate_census_like(rows, cfg.seed);
  } else {
    throw DomainError("unknown dataset format");
  }
  if (cfg.max_rows > 0 && cfg.max_rows < data.rows.size()) {
    Rng sub_rng = Rng(cfg.seed).fork("subsample");
    std::vector<uint32_t> keep =
        sub_rng.sample_indices(static_cast<uint32_t>(data.rows.size()),
                               static_cast<uint32_t>(cfg.max_rows));
    Dataset trimmed;
    trimmed.name = data.name;
    trimmed.n_features = data.n_features;
    trimmed.n_classes = data.n_classes;
    for (uint32_t i : keep) {
      trimmed.rows.push_back(std::move(data.rows[i]));
      trimmed.labels.push_back(data.labels[i]);
    }
    trimmed.feature_domains = compute_feature_domains(trimmed.rows, trimmed.n_features);
    return trimmed;
  }
  return data;
}

RunReport run_train(const ExperimentConfig& cfg, const Dataset& data) {
  cfg.validate();
  if (data.n_classes != 2) {
    throw DomainError("train: binary labels required (one-vs-rest is a library-level helper)");
  }
  std::filesystem::create_directories(cfg.out_dir);
  std::string run_id = config_hash(cfg);
  PreparedData prep = prepare(cfg, data);

  FedTrainer trainer(&data, prep.shards, cfg.protocol(), cfg.seed);
  TrainLog log;
  BoostModel model = trainer.train(&log, prep.eval_rows, prep.eval_labels);

  RunReport report;
  report.accuracy = log.accuracy;
  report.loss = log.loss;
  report.final_accuracy = accuracy(model, prep.eval_rows, prep.eval_labels);
  report.aborted_rounds = trainer.aborted_rounds();
  report.model_dump = format_model(model);

  write_file(cfg.out_dir + "/accuracy.csv", accuracy_csv(log, run_id));
  write_file(cfg.out_dir + "/metrics.csv", metrics_csv(trainer.bus().snapshot_metrics(), run_id));
  write_file(cfg.out_dir + "/model.txt", report.model_dump);
  return report;
}

CompareReport run_compare(const ExperimentConfig& cfg, const Dataset& data) {
  RunReport fed = run_train(cfg, data);

  PreparedData prep = prepare(cfg, data);
  std::vector<SparseRow> train_rows = gather_rows(data, prep.train_ids);
  std::vector<int> train_labels = gather_labels(data, prep.train_ids);
  Rng master(cfg.seed);
  TrainLog cent_log;
  BoostModel central =
      centralized_train(train_rows, train_labels, data.feature_domains, cfg.train_config(),
                        master, &cent_log, prep.eval_rows, prep.eval_labels);

  CompareReport cmp;
  cmp.federated_accuracy = fed.final_accuracy;
  cmp.centralized_accuracy = accuracy(central, prep.eval_rows, prep.eval_labels);
  cmp.delta_pp = std::abs(cmp.federated_accuracy - cmp.centralized_accuracy) * 100.0;
  std::string central_dump = format_model(central);
  cmp.dumps_identical = central_dump == fed.model_dump;
  cmp.aborted_rounds = fed.aborted_rounds;

  std::string run_id = config_hash(cfg);
  write_file(cfg.out_dir + "/model_centralized.txt", central_dump);
  std::string csv = "# config=" + run_id + "\n";
  csv += "run_id,federated_accuracy,centralized_accuracy,delta_pp,dumps_identical\n";
  csv += fmt("%s,%.17g,%.17g,%.17g,%d\n", run_id.c_str(), cmp.federated_accuracy,
             cmp.centralized_accuracy, cmp.delta_pp, cmp.dumps_identical ? 1 : 0);
  write_file(cfg.out_dir + "/compare.csv", csv);
  return cmp;
}

std::vector<SweepRow> run_secagg_bench(const ExperimentConfig& cfg, const SweepSpec& spec) {
  cfg.validate();
  if (spec.n_values.empty() || spec.m_values.empty() || spec.dropout_rates.empty()) {
    throw DomainError("sweep: empty range");
  }
  std::vector<SweepRow> rows;
  Rng root(cfg.seed);
  for (uint32_t n : spec.n_values) {
    for (uint32_t m : spec.m_values) {
      for (double rate : spec.dropout_rates) {
        SweepRow row;
        row.n = n;
        row.m = m;
        row.rate = rate;

        Dataset dummy;
        dummy.rows.resize(n);
        dummy.labels.assign(n, 0);
        dummy.n_features = 1;
        dummy.feature_domains = {FeatureDomain{0.0, 1.0}};

        Partition shards;
        for (uint32_t u = 1; u <= n; ++u) shards[u] = {u - 1};

        ProtocolConfig pcfg;
        pcfg.n_users = n;
        pcfg.threshold_t = std::max<uint32_t>(1, static_cast<uint32_t>(std::floor(0.6 * n)));
        pcfg.sec_param = cfg.sec_param;
        pcfg.frac_bits = cfg.frac_bits;
        pcfg.dropout.period = 1;
        pcfg.dropout.rate = rate;
        pcfg.drop_phase = DropPhase::Aggregation;

        std::string cell = fmt("cell:%u:%u:%.3f", n, m, rate);
        Rng cell_rng = root.fork(cell);
        uint64_t cell_seed = cell_rng.u64();
        std::map<uint32_t, std::vector<double>> values;
        for (uint32_t u = 1; u <= n; ++u) {
          std::vector<double>& v = values[u];
          v.reserve(m);
          for (uint32_t j = 0; j < m; ++j) {
            v.push_back((cell_rng.index(200001) - 100000) / 1000.0);
          }
        }

        try {
          FedTrainer trainer(&dummy, shards, pcfg, cell_seed);
          std::vector<double> sum = trainer.run_secagg_once(values);
          // Cross-check against the plaintext sum of the surviving users.
          const std::vector<uint32_t>& active = trainer.registered();
          double tolerance = FixedPointConfig{cfg.frac_bits, Bigint(1)}.tolerance() *
                             static_cast<double>(active.size());
          row.ok = sum.size() == m;
          for (uint32_t j = 0; j < m && row.ok; ++j) {
            double expected = 0;
            for (uint32_t u : active) expected += values[u][j];
            if (std::abs(sum[j] - expected) > tolerance) row.ok = false;
          }
          const RoundMetrics& metrics = trainer.bus().metrics();
          double sent = 0, recv = 0, cpu = 0;
          for (uint32_t u : active) {
            sent += static_cast<double>(metrics.entity_bytes_sent(u));
            recv += static_cast<double>(metrics.entity_bytes_recv(u));
            cpu += trainer.bus().clock().cpu_ms(u);
          }
          row.user_bytes_sent = sent / active.size();
          row.user_bytes_recv = recv / active.size();
          row.user_cpu_ms = cpu / active.size();
          row.server_bytes_sent = metrics.entity_bytes_sent(kServerId);
          row.server_bytes_recv = metrics.entity_bytes_recv(kServerId);
          row.server_cpu_ms = trainer.bus().clock().cpu_ms(kServerId);
        } catch (const RoundAbort&) {
          row.ok = false;  // infeasible cell stays in the sweep, marked aborted
        }
        rows.push_back(row);
      }
    }
  }

  if (!cfg.out_dir.empty()) {
    std::filesystem::create_directories(cfg.out_dir);
    std::string run_id = config_hash(cfg);
    std::string csv = "# config=" + run_id + "\n";
    csv +=
        "run_id,n,m,dropout_rate,status,user_bytes_sent,user_bytes_recv,server_bytes_sent,"
        "server_bytes_recv,user_cpu_ms,server_cpu_ms\n";
    for (const SweepRow& r : rows) {
      csv += fmt("%s,%u,%u,%.17g,%s,%.3f,%.3f,%llu,%llu,%.3f,%.3f\n", run_id.c_str(), r.n, r.m,
                 r.rate, r.ok ? "ok" : "aborted", r.user_bytes_sent, r.user_bytes_recv,
                 static_cast<unsigned long long>(r.server_bytes_sent),
                 static_cast<unsigned long long>(r.server_bytes_recv), r.user_cpu_ms,
                 r.server_cpu_ms);
    }
    write_file(cfg.out_dir + "/sweep.csv", csv);
  }
  return rows;
}

std::string run_keygen(const ExperimentConfig& cfg) {
  cfg.validate();
  std::filesystem::create_directories(cfg.out_dir);
  Rng rng = Rng(cfg.seed).fork("group");
  GroupParams gp = generate_group(cfg.sec_param, rng);
  std::vector<uint8_t> bytes = gp.serialize();
  std::string path = cfg.out_dir + "/group_params.bin";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  return path;
}

}  // namespace fedboost
