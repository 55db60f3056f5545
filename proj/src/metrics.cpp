// Copyright 2026 The Condatlas Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ca/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <thread>
#include <vector>

#include "ca/error.hpp"

namespace ca {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Nearest neighbor of q in cloud, ties to the lower index.
int nearest_brute(const PointCloud& cloud, const Point3& q) {
  int best = 0;
  double best_d = distance_sq(cloud[0], q);
  for (int i = 1; i < static_cast<int>(cloud.size()); ++i) {
    const double d = distance_sq(cloud[i], q);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

// Kd-trees only pay off once the quadratic scan gets large.
constexpr std::size_t kBrutePairLimit = 64 * 64;

std::vector<int> nearest_of_each(const PointCloud& from, const PointCloud& to) {
  std::vector<int> nn(from.size());
  if (from.size() * to.size() <= kBrutePairLimit) {
    for (std::size_t i = 0; i < from.size(); ++i) nn[i] = nearest_brute(to, from[i]);
  } else {
    SpatialIndex index(to);
    for (std::size_t i = 0; i < from.size(); ++i) nn[i] = index.nearest(from[i]);
  }
  return nn;
}

}  // namespace

double chamfer(const PointCloud& a, const PointCloud& b) {
  require(!a.empty() && !b.empty(), ErrorCode::Size, "chamfer requires nonempty clouds");
  const auto nn_ab = nearest_of_each(a, b);
  const auto nn_ba = nearest_of_each(b, a);
  double side_a = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) side_a += distance_sq(a[i], b[nn_ab[i]]);
  double side_b = 0.0;
  for (std::size_t j = 0; j < b.size(); ++j) side_b += distance_sq(b[j], a[nn_ba[j]]);
  return side_a / static_cast<double>(a.size()) + side_b / static_cast<double>(b.size());
}

ChamferGrad chamfer_grad(const PointCloud& a, const PointCloud& b) {
  require(!a.empty() && !b.empty(), ErrorCode::Size, "chamfer requires nonempty clouds");
  const auto nn_ab = nearest_of_each(a, b);
  const auto nn_ba = nearest_of_each(b, a);

  ChamferGrad out;
  out.grad_a.assign(a.size(), Point3{0, 0, 0});
  const double inv_a = 1.0 / static_cast<double>(a.size());
  const double inv_b = 1.0 / static_cast<double>(b.size());
  double side_a = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Point3 d = a[i] - b[nn_ab[i]];
    side_a += d.norm_sq();
    out.grad_a[i] += d * (2.0 * inv_a);
  }
  double side_b = 0.0;
  for (std::size_t j = 0; j < b.size(); ++j) {
    const Point3 d = a[nn_ba[j]] - b[j];
    side_b += d.norm_sq();
    out.grad_a[nn_ba[j]] += d * (2.0 * inv_b);
  }
  out.value = side_a * inv_a + side_b * inv_b;
  return out;
}

// ---------------------------------------------------------------------------
// Exact EMD via the Hungarian algorithm (shortest augmenting paths with
// potentials).

namespace {

std::vector<int> hungarian(const std::vector<std::vector<double>>& cost) {
  const int n = static_cast<int>(cost.size());
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> match(n + 1, 0);  // match[j] = row assigned to column j (1-based)
  std::vector<int> way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = match[j0];
      int j1 = -1;
      double delta = kInf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(n);
  for (int j = 1; j <= n; ++j) row_to_col[match[j] - 1] = j - 1;
  return row_to_col;
}

}  // namespace

double emd_exact(const PointCloud& a, const PointCloud& b) {
  require(a.size() == b.size(), ErrorCode::Size, "emd requires equal cloud sizes");
  require(!a.empty(), ErrorCode::Size, "emd requires nonempty clouds");
  require(static_cast<int>(a.size()) <= kEmdExactMaxPoints, ErrorCode::Capacity,
          "emd_exact is limited to 512 points; use emd_approx");
  const int n = static_cast<int>(a.size());
  std::vector<std::vector<double>> cost(n, std::vector<double>(n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) cost[i][j] = distance(a[i], b[j]);
  }
  const auto assign = hungarian(cost);
  double total = 0.0;
  for (int i = 0; i < n; ++i) total += cost[i][assign[i]];
  return total / n;
}

// ---------------------------------------------------------------------------
// Approximate EMD via forward auction with epsilon scaling.

namespace {

// Pairs up points with bitwise-identical coordinates. For metric ground
// costs, fixing zero-cost pairs is always consistent with an optimal
// matching, and it makes emd_approx(A, A) return exactly zero.
void match_exact_duplicates(const PointCloud& a, const PointCloud& b, std::vector<int>& rest_a,
                            std::vector<int>& rest_b) {
  std::map<std::array<double, 3>, std::vector<int>> pool;
  for (int j = 0; j < static_cast<int>(b.size()); ++j) {
    pool[{b[j].x, b[j].y, b[j].z}].push_back(j);
  }
  std::vector<char> b_taken(b.size(), 0);
  for (int i = 0; i < static_cast<int>(a.size()); ++i) {
    auto it = pool.find({a[i].x, a[i].y, a[i].z});
    if (it != pool.end() && !it->second.empty()) {
      b_taken[it->second.back()] = 1;
      it->second.pop_back();
    } else {
      rest_a.push_back(i);
    }
  }
  for (int j = 0; j < static_cast<int>(b.size()); ++j) {
    if (!b_taken[j]) rest_b.push_back(j);
  }
}

}  // namespace

double emd_approx(const PointCloud& a, const PointCloud& b, int max_rounds) {
  require(a.size() == b.size(), ErrorCode::Size, "emd requires equal cloud sizes");
  require(!a.empty(), ErrorCode::Size, "emd requires nonempty clouds");
  require(max_rounds >= 1, ErrorCode::Parameter, "max_rounds must be >= 1");

  std::vector<int> ia, ib;
  match_exact_duplicates(a, b, ia, ib);
  const int n = static_cast<int>(ia.size());
  const int full_n = static_cast<int>(a.size());
  if (n == 0) return 0.0;

  auto cost = [&](int i, int j) { return distance(a[ia[i]], b[ib[j]]); };

  double max_cost = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) max_cost = std::max(max_cost, cost(i, j));
  }
  if (max_cost == 0.0) return 0.0;

  std::vector<double> price(n, 0.0);
  std::vector<int> owner(n, -1);    // object -> person
  std::vector<int> assigned(n, -1); // person -> object
  double eps = max_cost / 4.0;
  double total = 0.0;

  for (int round = 0; round < max_rounds; ++round) {
    std::fill(owner.begin(), owner.end(), -1);
    std::fill(assigned.begin(), assigned.end(), -1);
    std::vector<int> queue(n);
    for (int i = 0; i < n; ++i) queue[i] = i;

    while (!queue.empty()) {
      const int person = queue.back();
      queue.pop_back();
      int best_j = -1;
      double best = kInf, second = kInf;
      for (int j = 0; j < n; ++j) {
        const double value = cost(person, j) + price[j];
        if (value < best) {
          second = best;
          best = value;
          best_j = j;
        } else if (value < second) {
          second = value;
        }
      }
      price[best_j] += (second == kInf ? 0.0 : second - best) + eps;
      if (owner[best_j] >= 0) {
        assigned[owner[best_j]] = -1;
        queue.push_back(owner[best_j]);
      }
      owner[best_j] = person;
      assigned[person] = best_j;
    }

    total = 0.0;
    for (int i = 0; i < n; ++i) total += cost(i, assigned[i]);
    // Assignment cost exceeds the optimum by at most n*eps; stop once that
    // slack is below 0.5% (or the costs themselves have vanished).
    if (n * eps <= 5e-3 * total || total <= 1e-12 * max_cost) break;
    eps /= 4.0;
  }
  return total / full_n;
}

// ---------------------------------------------------------------------------
// Set-level generative metrics.

JsdResult jsd(const CloudSet& gen, const CloudSet& ref, int grid) {
  require(!gen.empty() && !ref.empty(), ErrorCode::Size, "jsd requires nonempty cloud sets");
  require(grid >= 1, ErrorCode::Parameter, "jsd grid must be >= 1");

  JsdResult out;
  const std::size_t cells = static_cast<std::size_t>(grid) * grid * grid;
  auto histogram = [&](const CloudSet& set) {
    std::vector<double> h(cells, 0.0);
    double count = 0.0;
    for (const auto& cloud : set) {
      require(!cloud.empty(), ErrorCode::Size, "jsd requires nonempty clouds");
      for (const auto& p : cloud) {
        bool clamped = false;
        int idx[3];
        for (int k = 0; k < 3; ++k) {
          const double c = p[k];
          if (c < -1.0 || c > 1.0) clamped = true;
          int i = static_cast<int>(std::floor((c + 1.0) * 0.5 * grid));
          i = std::clamp(i, 0, grid - 1);
          idx[k] = i;
        }
        if (clamped) ++out.clamped;
        h[(static_cast<std::size_t>(idx[0]) * grid + idx[1]) * grid + idx[2]] += 1.0;
        count += 1.0;
      }
    }
    for (auto& v : h) v /= count;
    return h;
  };

  const auto p = histogram(gen);
  const auto q = histogram(ref);
  double sum = 0.0;
  for (std::size_t c = 0; c < cells; ++c) {
    const double m = p[c] + q[c];
    if (p[c] > 0.0) sum += 0.5 * p[c] * std::log(2.0 * p[c] / m);
    if (q[c] > 0.0) sum += 0.5 * q[c] * std::log(2.0 * q[c] / m);
  }
  out.value = sum;
  return out;
}

double cloud_distance(const PointCloud& a, const PointCloud& b, DistanceKind kind) {
  if (kind == DistanceKind::CD) return chamfer(a, b);
  if (static_cast<int>(a.size()) <= kEmdExactMaxPoints && a.size() == b.size()) {
    return emd_exact(a, b);
  }
  return emd_approx(a, b);
}

namespace {

void check_cloud_sets(const CloudSet& gen, const CloudSet& ref) {
  require(!gen.empty() && !ref.empty(), ErrorCode::Size, "cloud sets must be nonempty");
  const std::size_t n = gen.front().size();
  require(n > 0, ErrorCode::Size, "clouds must be nonempty");
  for (const auto& c : gen) {
    require(c.size() == n, ErrorCode::Size, "cloud sets must have uniform cloud size");
  }
  for (const auto& c : ref) {
    require(c.size() == n, ErrorCode::Size, "cloud sets must have uniform cloud size");
  }
}

// Full |gen| x |ref| distance matrix; rows are computed independently so the
// optional threading changes nothing about the values.
std::vector<std::vector<double>> pairwise_matrix(const CloudSet& gen, const CloudSet& ref,
                                                 DistanceKind kind, int threads) {
  std::vector<std::vector<double>> d(gen.size(), std::vector<double>(ref.size()));
  auto worker = [&](std::size_t begin, std::size_t end) {
    for (std::size_t g = begin; g < end; ++g) {
      for (std::size_t r = 0; r < ref.size(); ++r) {
        d[g][r] = cloud_distance(gen[g], ref[r], kind);
      }
    }
  };
  if (threads <= 1 || gen.size() < 2) {
    worker(0, gen.size());
  } else {
    const std::size_t t = std::min<std::size_t>(threads, gen.size());
    std::vector<std::thread> pool;
    const std::size_t chunk = (gen.size() + t - 1) / t;
    for (std::size_t k = 0; k < t; ++k) {
      const std::size_t begin = k * chunk;
      const std::size_t end = std::min(gen.size(), begin + chunk);
      if (begin < end) pool.emplace_back(worker, begin, end);
    }
    for (auto& th : pool) th.join();
  }
  return d;
}

}  // namespace

double mmd(const CloudSet& gen, const CloudSet& ref, DistanceKind kind, int threads) {
  check_cloud_sets(gen, ref);
  const auto d = pairwise_matrix(gen, ref, kind, threads);
  double sum = 0.0;
  for (std::size_t r = 0; r < ref.size(); ++r) {
    double best = kInf;
    for (std::size_t g = 0; g < gen.size(); ++g) best = std::min(best, d[g][r]);
    sum += best;
  }
  return sum / static_cast<double>(ref.size());
}

double cov(const CloudSet& gen, const CloudSet& ref, DistanceKind kind, int threads) {
  check_cloud_sets(gen, ref);
  const auto d = pairwise_matrix(gen, ref, kind, threads);
  std::set<std::size_t> covered;
  for (std::size_t g = 0; g < gen.size(); ++g) {
    std::size_t best_r = 0;
    for (std::size_t r = 1; r < ref.size(); ++r) {
      if (d[g][r] < d[g][best_r]) best_r = r;
    }
    covered.insert(best_r);
  }
  return static_cast<double>(covered.size()) / static_cast<double>(ref.size());
}

}  // namespace ca
