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

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "fedboost/bresson.hpp"
#include "fedboost/group.hpp"
#include "fedboost/secagg.hpp"
#include "fedboost/shamir.hpp"

namespace fedboost::testing {

/// A full user-side setup for driving the aggregation functions directly
/// (no bus): keypairs, pairwise keyrings, and threshold-shared mask keys.
struct SecaggWorld {
  GroupParams params;
  KeyPair server;
  uint32_t t = 1;
  std::vector<uint32_t> users;                    // 1..n
  std::map<uint32_t, KeyPair> mask_keys;          // per user
  std::map<uint32_t, MaskKeyring> keyrings;       // per user
  std::map<uint32_t, std::map<uint32_t, KeyShare>> stored;  // holder -> owner -> share

  static SecaggWorld create(const GroupParams& gp, uint32_t n, uint32_t t, Rng& rng) {
    SecaggWorld w;
    w.params = gp;
    w.t = t;
    w.server = key_gen(gp, rng);
    std::map<uint32_t, Bigint> pubs;
    for (uint32_t u = 1; u <= n; ++u) {
      w.users.push_back(u);
      w.mask_keys[u] = key_gen(gp, rng);
      pubs[u] = w.mask_keys[u].pub;
    }
    for (uint32_t u = 1; u <= n; ++u) {
      w.keyrings[u] = build_keyring(gp, u, w.mask_keys[u].pri, pubs);
      for (const KeyShare& s : share(w.mask_keys[u].pri, t, n, gp.p, rng, u)) {
        w.stored[s.holder][u] = s;
      }
    }
    return w;
  }

  /// Regenerates one user's mask keypair and re-shares it.
  void refresh_user(uint32_t u, Rng& rng) {
    mask_keys[u] = key_gen(params, rng);
    std::map<uint32_t, Bigint> pubs;
    for (uint32_t v : users) pubs[v] = mask_keys[v].pub;
    for (uint32_t v : users) keyrings[v] = build_keyring(params, v, mask_keys[v].pri, pubs);
    for (const KeyShare& s : share(mask_keys[u].pri, t, static_cast<uint32_t>(users.size()),
                                   params.p, rng, u)) {
      stored[s.holder][u] = s;
    }
  }

  AggregationState make_state() const {
    AggregationState st;
    st.params = params;
    st.server_keys = server;
    st.threshold_t = t;
    st.registered = users;
    for (uint32_t u : users) st.user_mask_pubs.emplace(u, mask_keys.at(u).pub);
    return st;
  }

  /// Runs one full aggregation: `inputs` per user (already in Z_N),
  /// `active` the users that deliver vectors and reveals.
  std::vector<Bigint> aggregate(const std::map<uint32_t, std::vector<Bigint>>& inputs,
                                const std::vector<uint32_t>& active, Rng& rng) const {
    AggregationState st = make_state();
    std::map<uint32_t, Bigint> rs;
    for (uint32_t u : active) {
      rs[u] = rng.unit(params.N);
      st.add_vector(mask_encoded(inputs.at(u), rs[u], keyrings.at(u), users,
                                 server.pub, params));
    }
    for (uint32_t u : active) {
      st.add_reveal(open_seed(params, u, rs.at(u), users, active, stored.at(u)));
    }
    return aggregate_unmask_raw(st);
  }
};

struct LinearFit {
  double intercept = 0, slope = 0, r2 = 0, rss = 0;
};

inline LinearFit fit_linear(const std::vector<double>& x, const std::vector<double>& y) {
  size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  LinearFit f;
  double denom = n * sxx - sx * sx;
  f.slope = (n * sxy - sx * sy) / denom;
  f.intercept = (sy - f.slope * sx) / n;
  double ss_tot = 0, ss_res = 0, mean = sy / n;
  for (size_t i = 0; i < n; ++i) {
    double pred = f.intercept + f.slope * x[i];
    ss_res += (y[i] - pred) * (y[i] - pred);
    ss_tot += (y[i] - mean) * (y[i] - mean);
  }
  f.rss = ss_res;
  f.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  return f;
}

/// Least squares for y = a + b x + c x^2 via normal equations.
inline double fit_quadratic_rss(const std::vector<double>& x, const std::vector<double>& y) {
  size_t n = x.size();
  double s[5] = {static_cast<double>(n), 0, 0, 0, 0};
  double t[3] = {0, 0, 0};
  for (size_t i = 0; i < n; ++i) {
    double xi = x[i], x2 = xi * xi;
    s[1] += xi;
    s[2] += x2;
    s[3] += x2 * xi;
    s[4] += x2 * x2;
    t[0] += y[i];
    t[1] += y[i] * xi;
    t[2] += y[i] * x2;
  }
  double a[3][4] = {{s[0], s[1], s[2], t[0]}, {s[1], s[2], s[3], t[1]}, {s[2], s[3], s[4], t[2]}};
  for (int col = 0; col < 3; ++col) {
    int pivot = col;
    for (int r = col + 1; r < 3; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    }
    std::swap(a[col], a[pivot]);
    for (int r = 0; r < 3; ++r) {
      if (r == col) continue;
      double factor = a[r][col] / a[col][col];
      for (int c = col; c < 4; ++c) a[r][c] -= factor * a[col][c];
    }
  }
  double coef[3];
  for (int i = 0; i < 3; ++i) coef[i] = a[i][3] / a[i][i];
  double rss = 0;
  for (size_t i = 0; i < n; ++i) {
    double pred = coef[0] + coef[1] * x[i] + coef[2] * x[i] * x[i];
    rss += (y[i] - pred) * (y[i] - pred);
  }
  return rss;
}

/// Akaike information criterion for a least-squares fit.
inline double aic(double rss, size_t n, unsigned k) {
  return 2.0 * k + static_cast<double>(n) * std::log(std::max(rss, 1e-12) / n);
}

}  // namespace fedboost::testing
