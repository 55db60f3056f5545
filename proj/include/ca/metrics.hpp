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

#ifndef CA_METRICS_HPP
#define CA_METRICS_HPP

#include <vector>

#include "ca/geom.hpp"

namespace ca {

enum class DistanceKind { CD, EMD };

using CloudSet = std::vector<PointCloud>;

// Symmetric Chamfer: mean squared nearest-neighbor distance per side, summed.
double chamfer(const PointCloud& a, const PointCloud& b);

struct ChamferGrad {
  double value = 0.0;
  std::vector<Point3> grad_a;  // d(value)/d(a[i])
};

// Chamfer plus its gradient with respect to the first cloud. Nearest-neighbor
// ties resolve to the lower index.
ChamferGrad chamfer_grad(const PointCloud& a, const PointCloud& b);

// Exact Earth Mover's distance: (1/n) * min over bijections of the summed
// Euclidean ground distances, solved by the Hungarian algorithm.
// Throws Error(Size) on size mismatch and Error(Capacity) for n > 512
// (use emd_approx beyond that).
double emd_exact(const PointCloud& a, const PointCloud& b);

inline constexpr int kEmdExactMaxPoints = 512;

// Auction-algorithm approximation with epsilon scaling. Returns the mean cost
// of a feasible bijection, so it never undershoots the exact optimum; scaling
// continues until the duality gap is below 0.5% or `max_rounds` is hit.
double emd_approx(const PointCloud& a, const PointCloud& b, int max_rounds = 40);

struct JsdResult {
  double value = 0.0;
  long clamped = 0;  // points outside [-1,1]^3 clamped into boundary voxels
};

inline constexpr int kJsdDefaultGrid = 28;

// Jensen-Shannon divergence between pooled occupancy histograms on a G^3 grid
// over [-1,1]^3, natural log.
JsdResult jsd(const CloudSet& gen, const CloudSet& ref, int grid = kJsdDefaultGrid);

// Distance between two clouds under the given kind; EMD picks the exact
// solver up to kEmdExactMaxPoints and the auction beyond.
double cloud_distance(const PointCloud& a, const PointCloud& b, DistanceKind kind);

// Minimum matching distance: mean over ref of the closest gen cloud.
double mmd(const CloudSet& gen, const CloudSet& ref, DistanceKind kind, int threads = 1);

// Coverage: fraction of ref clouds that are the nearest reference of some
// generated cloud (argmin ties resolve to the lower reference index).
double cov(const CloudSet& gen, const CloudSet& ref, DistanceKind kind, int threads = 1);

}  // namespace ca

#endif  // CA_METRICS_HPP
