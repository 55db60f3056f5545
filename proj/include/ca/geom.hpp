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

#ifndef CA_GEOM_HPP
#define CA_GEOM_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

namespace ca {

struct Point3 {
  double x = 0.0, y = 0.0, z = 0.0;

  Point3() = default;
  Point3(double px, double py, double pz) : x(px), y(py), z(pz) {}

  Point3 operator+(const Point3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Point3 operator-(const Point3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Point3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Point3 operator/(double s) const { return {x / s, y / s, z / s}; }
  Point3& operator+=(const Point3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }

  double dot(const Point3& o) const { return x * o.x + y * o.y + z * o.z; }
  Point3 cross(const Point3& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  double norm_sq() const { return dot(*this); }
  double norm() const { return std::sqrt(norm_sq()); }
  Point3 normalized() const {
    const double n = norm();
    return {x / n, y / n, z / n};
  }
  bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }

  double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
};

inline Point3 operator*(double s, const Point3& p) { return p * s; }

inline double distance_sq(const Point3& a, const Point3& b) { return (a - b).norm_sq(); }
inline double distance(const Point3& a, const Point3& b) { return (a - b).norm(); }

// Order carries no semantics; kept as a vector for cheap indexing.
using PointCloud = std::vector<Point3>;

struct TriMesh {
  std::vector<Point3> vertices;
  std::vector<std::array<int, 3>> faces;

  // Unique unordered vertex-index pairs appearing in any face, each pair
  // ordered (low, high) and the list sorted lexicographically.
  std::vector<std::pair<int, int>> edges() const;

  // Throws Error(Geometry) on out-of-range indices, repeated indices within a
  // face, or non-finite vertices.
  void validate() const;
};

struct UvGrid {
  int resolution = 0;                             // m
  std::vector<std::array<double, 2>> vertices;    // m*m, index j*m+i -> (i,j)/(m-1)
  std::vector<std::array<int, 4>> quads;          // (m-1)^2, corners (i,j),(i+1,j),(i+1,j+1),(i,j+1)
  std::vector<std::array<int, 3>> triangles;      // 2(m-1)^2, fixed diagonal split
};

// Quad-sphere: a cube subdivided `resolution` times per edge and projected
// onto the unit sphere. `quads` lists each cell's corner vertices in the
// order (0,0),(1,0),(1,1),(0,1) of the cell's local frame, oriented outward.
struct QuadSphere {
  int resolution = 0;
  std::vector<Point3> vertices;
  std::vector<std::array<int, 4>> quads;
  struct Cell {
    int face, a, b;
  };
  std::vector<Cell> cells;  // aligned with quads

  TriMesh to_trimesh() const;
};

// Canonical integer coordinates of lattice point (a, b) of `face` on a cube
// whose edges are split into n segments. Shared edges and corners of the six
// faces map to identical keys.
std::array<std::int64_t, 3> cube_lattice_key(int face, std::int64_t a, std::int64_t b,
                                             std::int64_t n);

// Cube-surface position of a lattice key on the unit cube [-1,1]^3.
Point3 cube_lattice_point(const std::array<std::int64_t, 3>& key, std::int64_t n);

// Immutable balanced kd-tree over a copy of the cloud. Queries match a
// brute-force scan exactly, with distance ties broken by the lower index.
class SpatialIndex {
 public:
  explicit SpatialIndex(const PointCloud& cloud, int leaf_size = 16);

  // Indices of the k nearest points, ascending by (distance, index).
  // Throws Error(Size) if k > size, Error(Parameter) if k < 1.
  std::vector<int> knn(const Point3& query, int k) const;

  int nearest(const Point3& query) const { return knn(query, 1)[0]; }
  double nearest_dist_sq(const Point3& query) const;

  const PointCloud& points() const { return points_; }
  int size() const { return static_cast<int>(points_.size()); }

 private:
  struct Node {
    double box_min[3], box_max[3];
    int left = -1, right = -1;  // children; -1 for leaves
    int begin = 0, end = 0;     // leaf range into order_
  };

  int build(int begin, int end, int leaf_size);

  PointCloud points_;
  std::vector<int> order_;
  std::vector<Node> nodes_;
  int root_ = -1;
};

std::vector<int> knn(const SpatialIndex& index, const Point3& query, int k);

struct SurfaceSamples {
  PointCloud points;
  std::vector<int> face_indices;
  std::vector<Point3> normals;  // unit normal of the source face
};

// Area-proportional face choice, uniform barycentric placement, deterministic
// per seed. Throws Error(Geometry) if every face has zero area.
SurfaceSamples sample_surface(const TriMesh& mesh, int n, std::uint64_t seed);

QuadSphere unit_quad_sphere(int resolution);

// Triangulated quad-sphere; closed genus-0, every vertex on the unit sphere.
TriMesh unit_sphere_quadgrid(int resolution);

UvGrid uv_grid(int m);

// Merges vertices within epsilon (union-find over a uniform grid, iterated to
// a fixpoint) to their cluster centroid, reindexes faces, and drops faces
// left with fewer than three distinct vertices.
TriMesh weld_vertices(const TriMesh& mesh, double epsilon);

// Sum of squared lengths over the deduplicated edge set.
double edge_sq_sum(const TriMesh& mesh);

}  // namespace ca

#endif  // CA_GEOM_HPP
