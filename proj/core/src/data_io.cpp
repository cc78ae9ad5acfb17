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
#include "fedboost/data_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "fedboost/errors.hpp"

namespace fedboost {

namespace {

int binarize_label(double raw, size_t line_no, int& max_label) {
  double rounded = std::round(raw);
  if (std::abs(raw - rounded) > 1e-9) {
    throw ParseError("line " + std::to_string(line_no) + ": non-integer label");
  }
  int v = static_cast<int>(rounded);
  if (v == -1) v = 0;
  if (v < 0 || v > 9) {
    throw ParseError("line " + std::to_string(line_no) + ": label outside {-1,0..9}");
  }
  max_label = std::max(max_label, v);
  return v;
}

void finish_dataset(Dataset& ds, int max_label) {
  ds.n_classes = max_label > 1 ? max_label + 1 : 2;
  ds.feature_domains = compute_feature_domains(ds.rows, ds.n_features);
}

uint32_t read_be32(std::ifstream& in, const std::string& what) {
  uint8_t buf[4];
  if (!in.read(reinterpret_cast<char*>(buf), 4)) throw ParseError(what + ": truncated header");
  return (uint32_t(buf[0]) << 24) | (uint32_t(buf[1]) << 16) | (uint32_t(buf[2]) << 8) | buf[3];
}

}  // namespace

Dataset load_libsvm(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  Dataset ds;
  ds.name = path;
  std::string line;
  size_t line_no = 0;
  int max_label = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    double raw_label;
    if (!(ls >> raw_label)) throw ParseError("line " + std::to_string(line_no) + ": missing label");
    SparseRow row;
    std::string tok;
    while (ls >> tok) {
      size_t colon = tok.find(':');
      if (colon == std::string::npos) {
        throw ParseError("line " + std::to_string(line_no) + ": expected idx:val, got " + tok);
      }
      try {
        size_t idx_end = 0, val_end = 0;
        std::string idx_part = tok.substr(0, colon);
        std::string val_part = tok.substr(colon + 1);
        unsigned long idx = std::stoul(idx_part, &idx_end);
        double val = std::stod(val_part, &val_end);
        if (idx_end != idx_part.size() || val_end != val_part.size()) {
          throw std::invalid_argument(tok);
        }
        row.set(static_cast<uint32_t>(idx), val);
        ds.n_features = std::max(ds.n_features, static_cast<uint32_t>(idx) + 1);
      } catch (const std::logic_error&) {
        throw ParseError("line " + std::to_string(line_no) + ": bad pair " + tok);
      }
    }
    ds.labels.push_back(binarize_label(raw_label, line_no, max_label));
    ds.rows.push_back(std::move(row));
  }
  finish_dataset(ds, max_label);
  return ds;
}

void save_libsvm(const Dataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path);
  char buf[64];
  for (size_t i = 0; i < ds.rows.size(); ++i) {
    out << ds.labels[i];
    for (const auto& [f, v] : ds.rows[i].values) {
      std::snprintf(buf, sizeof buf, " %u:%.17g", f, v);
      out << buf;
    }
    out << '\n';
  }
}

Dataset load_csv(const std::string& path, const std::string& label_column) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path + ": empty file");
  std::vector<std::string> headers;
  {
    std::istringstream hs(line);
    std::string col;
    while (std::getline(hs, col, ',')) headers.push_back(col);
  }
  int label_idx = -1;
  for (size_t i = 0; i < headers.size(); ++i) {
    if (headers[i] == label_column) label_idx = static_cast<int>(i);
  }
  if (label_idx < 0) throw ParseError(path + ": no column named " + label_column);

  Dataset ds;
  ds.name = path;
  ds.n_features = static_cast<uint32_t>(headers.size() - 1);
  size_t line_no = 1;
  int max_label = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    SparseRow row;
    double raw_label = 0;
    uint32_t feature = 0;
    for (size_t col = 0; col < headers.size(); ++col) {
      if (!std::getline(ls, cell, ',')) {
        throw ParseError("row " + std::to_string(line_no) + ": too few columns");
      }
      double v;
      try {
        size_t end = 0;
        v = std::stod(cell, &end);
        if (end != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::logic_error&) {
        throw ParseError("row " + std::to_string(line_no) + ", column " + headers[col] +
                         ": non-numeric cell '" + cell + "'");
      }
      if (static_cast<int>(col) == label_idx) {
        raw_label = v;
      } else {
        if (v != 0.0) row.set(feature, v);
        ++feature;
      }
    }
    ds.labels.push_back(binarize_label(raw_label, line_no, max_label));
    ds.rows.push_back(std::move(row));
  }
  finish_dataset(ds, max_label);
  return ds;
}

Dataset load_mnist_idx(const std::string& images_path, const std::string& labels_path) {
  std::ifstream img(images_path, std::ios::binary);
  if (!img) throw ParseError("cannot open " + images_path);
  std::ifstream lab(labels_path, std::ios::binary);
  if (!lab) throw ParseError("cannot open " + labels_path);

  if (read_be32(img, images_path) != 0x00000803u) throw ParseError(images_path + ": bad magic");
  uint32_t count = read_be32(img, images_path);
  uint32_t rows = read_be32(img, images_path);
  uint32_t cols = read_be32(img, images_path);
  if (read_be32(lab, labels_path) != 0x00000801u) throw ParseError(labels_path + ": bad magic");
  uint32_t label_count = read_be32(lab, labels_path);
  if (label_count != count) throw ParseError("image/label count mismatch");

  Dataset ds;
  ds.name = images_path;
  ds.n_features = rows * cols;
  std::vector<uint8_t> pixels(ds.n_features);
  int max_label = 0;
  for (uint32_t i = 0; i < count; ++i) {
    if (!img.read(reinterpret_cast<char*>(pixels.data()), pixels.size())) {
      throw ParseError(images_path + ": truncated image data");
    }
    char label = 0;
    if (!lab.read(&label, 1)) throw ParseError(labels_path + ": truncated label data");
    SparseRow row;
    for (uint32_t p = 0; p < ds.n_features; ++p) {
      if (pixels[p] != 0) row.set(p, pixels[p] / 255.0);
    }
    ds.rows.push_back(std::move(row));
    ds.labels.push_back(binarize_label(label, i + 1, max_label));
  }
  finish_dataset(ds, max_label);
  return ds;
}

std::vector<FeatureDomain> compute_feature_domains(const std::vector<SparseRow>& rows,
                                                   uint32_t n_features) {
  std::vector<FeatureDomain> domains(n_features);
  std::vector<size_t> seen(n_features, 0);
  for (auto& d : domains) {
    d.lo = std::numeric_limits<double>::infinity();
    d.hi = -std::numeric_limits<double>::infinity();
  }
  for (const SparseRow& row : rows) {
    for (const auto& [f, v] : row.values) {
      domains[f].lo = std::min(domains[f].lo, v);
      domains[f].hi = std::max(domains[f].hi, v);
      ++seen[f];
    }
  }
  for (uint32_t f = 0; f < n_features; ++f) {
    if (seen[f] < rows.size()) {  // some row holds the implicit zero
      domains[f].lo = std::min(domains[f].lo, 0.0);
      domains[f].hi = std::max(domains[f].hi, 0.0);
    }
    if (seen[f] == 0) domains[f] = FeatureDomain{0.0, 0.0};
  }
  return domains;
}

Partition partition(size_t n_rows, uint32_t n_users, Rng& rng) {
  if (n_users < 1) throw DomainError("partition: need at least one user");
  if (n_users > n_rows) throw DomainError("partition: more users than rows (empty shard)");
  std::vector<size_t> ids(n_rows);
  std::iota(ids.begin(), ids.end(), size_t{0});
  for (size_t i = n_rows; i > 1; --i) {
    size_t j = rng.index(static_cast<uint32_t>(i));
    std::swap(ids[i - 1], ids[j]);
  }
  Partition part;
  for (size_t i = 0; i < n_rows; ++i) {
    part[static_cast<uint32_t>(i % n_users) + 1].push_back(ids[i]);
  }
  return part;
}

std::pair<std::vector<size_t>, std::vector<size_t>> train_test_split(size_t n_rows,
                                                                     double test_fraction,
                                                                     Rng& rng) {
  if (test_fraction < 0 || test_fraction >= 1) {
    throw DomainError("train_test_split: fraction must be in [0, 1)");
  }
  std::vector<size_t> ids(n_rows);
  std::iota(ids.begin(), ids.end(), size_t{0});
  for (size_t i = n_rows; i > 1; --i) {
    size_t j = rng.index(static_cast<uint32_t>(i));
    std::swap(ids[i - 1], ids[j]);
  }
  size_t test_count = static_cast<size_t>(std::llround(test_fraction * n_rows));
  std::vector<size_t> test(ids.begin(), ids.begin() + test_count);
  std::vector<size_t> train(ids.begin() + test_count, ids.end());
  return {std::move(train), std::move(test)};
}

Dataset generate_census_like(size_t rows, uint64_t seed) {
  Rng rng(seed);
  Rng noise = rng.fork("noise");

  // Layout: continuous block, then one-hot groups.
  constexpr uint32_t kAge = 0, kHours = 1, kEducation = 2, kCapital = 3, kTenure = 4;
  const uint32_t group_sizes[] = {8, 7, 14, 6, 5, 2};  // work, marital, occupation,
                                                       // relationship, race, sex
  uint32_t base = 5;
  uint32_t n_features = base;
  for (uint32_t g : group_sizes) n_features += g;

  auto uniform = [&](Rng& r, double lo, double hi) {
    return lo + (hi - lo) * (r.u64() >> 11) * 0x1.0p-53;
  };

  Dataset ds;
  ds.name = "census-like(" + std::to_string(rows) + "," + std::to_string(seed) + ")";
  ds.n_features = n_features;
  for (size_t i = 0; i < rows; ++i) {
    SparseRow row;
    double age = std::floor(uniform(rng, 17, 90));
    double hours = std::floor(uniform(rng, 1, 99));
    double edu = std::floor(uniform(rng, 1, 16.999));
    double capital = uniform(rng, 0, 1) < 0.1 ? std::floor(uniform(rng, 100, 20000)) : 0.0;
    double tenure = std::floor(uniform(rng, 0, 40));
    row.set(kAge, age);
    row.set(kHours, hours);
    row.set(kEducation, edu);
    if (capital != 0) row.set(kCapital, capital);
    row.set(kTenure, tenure);

    double z = 0.045 * (age - 38) + 0.05 * (hours - 40) + 0.33 * (edu - 10) +
               0.0004 * capital + 0.02 * (tenure - 10);
    uint32_t offset = base;
    for (uint32_t g : group_sizes) {
      uint32_t pick = rng.index(g);
      row.set(offset + pick, 1.0);
      // Category effects alternate in sign and taper off with position.
      z += (pick % 2 == 0 ? 1.0 : -1.0) * 0.55 / (1.0 + pick);
      offset += g;
    }
    z = z - 3.1 + uniform(noise, -1.5, 1.5);
    int label = z > 0 ? 1 : 0;
    ds.rows.push_back(std::move(row));
    ds.labels.push_back(label);
  }
  finish_dataset(ds, 1);
  return ds;
}

}  // namespace fedboost
