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

#include "ca/geom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <unordered_map>

#include "ca/error.hpp"
#include "ca/rng.hpp"

namespace ca {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::Size: return "size error";
    case ErrorCode::Shape: return "shape error";
    case ErrorCode::Parameter: return "parameter error";
    case ErrorCode::Capacity: return "capacity error";
    case ErrorCode::Geometry: return "geometry error";
    case ErrorCode::Numeric: return "numeric error";
    case ErrorCode::Parse: return "parse error";
    case ErrorCode::Io: return "io error";
    case ErrorCode::State: return "state error";
    case ErrorCode::BadMagic: return "bad magic";
    case ErrorCode::BadVersion: return "bad version";
    case ErrorCode::BadCrc: return "bad crc";
  }
  return "error";
}

std::vector<std::pair<int, int>> TriMesh::edges() const {
  std::vector<std::pair<int, int>> out;
  out.reserve(faces.size() * 3);
  for (const auto& f : faces) {
    for (int k = 0; k < 3; ++k) {
      int a = f[k], b = f[(k + 1) % 3];
      if (a > b) std::swap(a, b);
      out.emplace_back(a, b);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void TriMesh::validate() const {
  const int n = static_cast<int>(vertices.size());
  for (const auto& v : vertices) {
    require(v.finite(), ErrorCode::Geometry, "non-finite vertex");
  }
  for (const auto& f : faces) {
    for (int k = 0; k < 3; ++k) {
      require(f[k] >= 0 && f[k] < n, ErrorCode::Geometry, "face index out of range");
    }
    require(f[0] != f[1] && f[1] != f[2] && f[0] != f[2], ErrorCode::Geometry,
            "face repeats a vertex index");
  }
}

// ---------------------------------------------------------------------------
// SpatialIndex

SpatialIndex::SpatialIndex(const PointCloud& cloud, int leaf_size) : points_(cloud) {
  require(!cloud.empty(), ErrorCode::Size, "SpatialIndex over empty cloud");
  require(leaf_size >= 1, ErrorCode::Parameter, "leaf size must be >= 1");
  for (const auto& p : cloud) {
    require(p.finite(), ErrorCode::Numeric, "non-finite point in cloud");
  }
  order_.resize(cloud.size());
  std::iota(order_.begin(), order_.end(), 0);
  nodes_.reserve(2 * cloud.size() / static_cast<std::size_t>(leaf_size) + 2);
  root_ = build(0, static_cast<int>(cloud.size()), leaf_size);
}

int SpatialIndex::build(int begin, int end, int leaf_size) {
  Node node;
  for (int d = 0; d < 3; ++d) {
    node.box_min[d] = std::numeric_limits<double>::infinity();
    node.box_max[d] = -std::numeric_limits<double>::infinity();
  }
  for (int i = begin; i < end; ++i) {
    const Point3& p = points_[order_[i]];
    for (int d = 0; d < 3; ++d) {
      node.box_min[d] = std::min(node.box_min[d], p[d]);
      node.box_max[d] = std::max(node.box_max[d], p[d]);
    }
  }
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back(node);
  if (end - begin <= leaf_size) {
    nodes_[id].begin = begin;
    nodes_[id].end = end;
    return id;
  }
  int axis = 0;
  double widest = -1.0;
  for (int d = 0; d < 3; ++d) {
    const double w = node.box_max[d] - node.box_min[d];
    if (w > widest) {
      widest = w;
      axis = d;
    }
  }
  const int mid = (begin + end) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](int a, int b) {
                     const double pa = points_[a][axis], pb = points_[b][axis];
                     return pa < pb || (pa == pb && a < b);
                   });
  const int left = build(begin, mid, leaf_size);
  const int right = build(mid, end, leaf_size);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

namespace {

double box_dist_sq(const double* box_min, const double* box_max, const Point3& q) {
  double d = 0.0;
  for (int k = 0; k < 3; ++k) {
    const double v = q[k];
    if (v < box_min[k]) {
      const double t = box_min[k] - v;
      d += t * t;
    } else if (v > box_max[k]) {
      const double t = v - box_max[k];
      d += t * t;
    }
  }
  return d;
}

// (distance^2, index) with the lower index winning ties.
using Cand = std::pair<double, int>;

}  // namespace

std::vector<int> SpatialIndex::knn(const Point3& query, int k) const {
  require(k >= 1, ErrorCode::Parameter, "knn requires k >= 1");
  require(k <= size(), ErrorCode::Size, "knn k exceeds cloud size");

  std::priority_queue<Cand> heap;  // max-heap: worst candidate on top
  auto consider = [&](int idx) {
    const Cand c{distance_sq(points_[idx], query), idx};
    if (static_cast<int>(heap.size()) < k) {
      heap.push(c);
    } else if (c < heap.top()) {
      heap.pop();
      heap.push(c);
    }
  };

  // Depth-first with nearer child first; prune on the heap's worst distance.
  std::vector<int> stack{root_};
  while (!stack.empty()) {
    const int id = stack.back();
    stack.pop_back();
    const Node& node = nodes_[id];
    if (static_cast<int>(heap.size()) == k &&
        box_dist_sq(node.box_min, node.box_max, query) > heap.top().first) {
      continue;
    }
    if (node.left < 0) {
      for (int i = node.begin; i < node.end; ++i) consider(order_[i]);
      continue;
    }
    const double dl = box_dist_sq(nodes_[node.left].box_min, nodes_[node.left].box_max, query);
    const double dr = box_dist_sq(nodes_[node.right].box_min, nodes_[node.right].box_max, query);
    if (dl <= dr) {
      stack.push_back(node.right);
      stack.push_back(node.left);
    } else {
      stack.push_back(node.left);
      stack.push_back(node.right);
    }
  }

  std::vector<Cand> found;
  found.reserve(heap.size());
  while (!heap.empty()) {
    found.push_back(heap.top());
    heap.pop();
  }
  std::sort(found.begin(), found.end());
  std::vector<int> out;
  out.reserve(found.size());
  for (const auto& c : found) out.push_back(c.second);
  return out;
}

double SpatialIndex::nearest_dist_sq(const Point3& query) const {
  return distance_sq(points_[nearest(query)], query);
}

std::vector<int> knn(const SpatialIndex& index, const Point3& query, int k) {
  return index.knn(query, k);
}

// ---------------------------------------------------------------------------
// Surface sampling

SurfaceSamples sample_surface(const TriMesh& mesh, int n, std::uint64_t seed) {
  require(n >= 1, ErrorCode::Parameter, "sample count must be >= 1");
  mesh.validate();

  std::vector<double> cumulative(mesh.faces.size());
  std::vector<Point3> face_normal(mesh.faces.size());
  double total = 0.0;
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const Point3& a = mesh.vertices[mesh.faces[f][0]];
    const Point3& b = mesh.vertices[mesh.faces[f][1]];
    const Point3& c = mesh.vertices[mesh.faces[f][2]];
    const Point3 cr = (b - a).cross(c - a);
    const double area2 = cr.norm();
    total += 0.5 * area2;
    cumulative[f] = total;
    face_normal[f] = area2 > 0.0 ? cr / area2 : Point3{0, 0, 0};
  }
  require(total > 0.0, ErrorCode::Geometry, "all faces degenerate");

  SurfaceSamples out;
  out.points.reserve(n);
  out.face_indices.reserve(n);
  out.normals.reserve(n);
  Rng rng(seed);
  for (int i = 0; i < n; ++i) {
    const double target = rng.uniform() * total;
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
    int f = static_cast<int>(std::min<std::size_t>(it - cumulative.begin(),
                                                   mesh.faces.size() - 1));
    // Zero-area faces carry zero probability mass but upper_bound can land on
    // one when the draw hits a repeated cumulative value; step past them.
    while (f + 1 < static_cast<int>(mesh.faces.size()) &&
           cumulative[f] == (f == 0 ? 0.0 : cumulative[f - 1])) {
      ++f;
    }
    double u = rng.uniform();
    double v = rng.uniform();
    if (u + v > 1.0) {
      u = 1.0 - u;
      v = 1.0 - v;
    }
    const Point3& a = mesh.vertices[mesh.faces[f][0]];
    const Point3& b = mesh.vertices[mesh.faces[f][1]];
    const Point3& c = mesh.vertices[mesh.faces[f][2]];
    out.points.push_back(a + (b - a) * u + (c - a) * v);
    out.face_indices.push_back(f);
    out.normals.push_back(face_normal[f]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Quad-sphere and grids

namespace {

// Face layouts chosen so each face's outward normal matches the cube axis it
// covers and quads wind counterclockwise seen from outside.
//
// face 0: +x, 1: -x, 2: +y, 3: -y, 4: +z, 5: -z
std::array<std::int64_t, 3> face_point(int face, std::int64_t a, std::int64_t b, std::int64_t n) {
  switch (face) {
    case 0: return {n, a, b};
    case 1: return {0, b, a};
    case 2: return {b, n, a};
    case 3: return {a, 0, b};
    case 4: return {a, b, n};
    default: return {b, a, 0};
  }
}

}  // namespace

std::array<std::int64_t, 3> cube_lattice_key(int face, std::int64_t a, std::int64_t b,
                                             std::int64_t n) {
  return face_point(face, a, b, n);
}

Point3 cube_lattice_point(const std::array<std::int64_t, 3>& key, std::int64_t n) {
  const double inv = 1.0 / static_cast<double>(n);
  return {2.0 * static_cast<double>(key[0]) * inv - 1.0,
          2.0 * static_cast<double>(key[1]) * inv - 1.0,
          2.0 * static_cast<double>(key[2]) * inv - 1.0};
}

QuadSphere unit_quad_sphere(int resolution) {
  require(resolution >= 2, ErrorCode::Parameter, "quad-sphere resolution must be >= 2");
  const std::int64_t n = resolution;

  QuadSphere sphere;
  sphere.resolution = resolution;
  std::map<std::array<std::int64_t, 3>, int> ids;
  auto vertex_id = [&](int face, std::int64_t a, std::int64_t b) {
    const auto key = cube_lattice_key(face, a, b, n);
    auto it = ids.find(key);
    if (it != ids.end()) return it->second;
    const int id = static_cast<int>(sphere.vertices.size());
    sphere.vertices.push_back(cube_lattice_point(key, n).normalized());
    ids.emplace(key, id);
    return id;
  };

  for (int face = 0; face < 6; ++face) {
    for (std::int64_t b = 0; b < n; ++b) {
      for (std::int64_t a = 0; a < n; ++a) {
        const int v00 = vertex_id(face, a, b);
        const int v10 = vertex_id(face, a + 1, b);
        const int v11 = vertex_id(face, a + 1, b + 1);
        const int v01 = vertex_id(face, a, b + 1);
        sphere.quads.push_back({v00, v10, v11, v01});
        sphere.cells.push_back({face, static_cast<int>(a), static_cast<int>(b)});
      }
    }
  }
  return sphere;
}

TriMesh QuadSphere::to_trimesh() const {
  TriMesh mesh;
  mesh.vertices = vertices;
  mesh.faces.reserve(quads.size() * 2);
  for (const auto& q : quads) {
    mesh.faces.push_back({q[0], q[1], q[2]});
    mesh.faces.push_back({q[0], q[2], q[3]});
  }
  return mesh;
}

TriMesh unit_sphere_quadgrid(int resolution) { return unit_quad_sphere(resolution).to_trimesh(); }

UvGrid uv_grid(int m) {
  require(m >= 2, ErrorCode::Parameter, "uv grid resolution must be >= 2");
  UvGrid grid;
  grid.resolution = m;
  grid.vertices.reserve(static_cast<std::size_t>(m) * m);
  const double inv = 1.0 / (m - 1);
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) {
      grid.vertices.push_back({i * inv, j * inv});
    }
  }
  auto at = [m](int i, int j) { return j * m + i; };
  for (int j = 0; j + 1 < m; ++j) {
    for (int i = 0; i + 1 < m; ++i) {
      const int v00 = at(i, j), v10 = at(i + 1, j), v11 = at(i + 1, j + 1), v01 = at(i, j + 1);
      grid.quads.push_back({v00, v10, v11, v01});
      grid.triangles.push_back({v00, v10, v11});
      grid.triangles.push_back({v00, v11, v01});
    }
  }
  return grid;
}

// ---------------------------------------------------------------------------
// Welding

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int a) {
    while (parent[a] != a) {
      parent[a] = parent[parent[a]];
      a = parent[a];
    }
    return a;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a > b) std::swap(a, b);  // keep the lower root for determinism
    parent[b] = a;
  }
};

struct CellKey {
  std::int64_t x, y, z;
  bool operator==(const CellKey&) const = default;
};

struct CellKeyHash {
  std::size_t operator()(const CellKey& k) const {
    std::uint64_t h = 1469598103934665603ULL;
    for (std::int64_t v : {k.x, k.y, k.z}) {
      h ^= static_cast<std::uint64_t>(v);
      h *= 1099511628211ULL;
    }
    return static_cast<std::size_t>(h);
  }
};

}  // namespace

TriMesh weld_vertices(const TriMesh& mesh, double epsilon) {
  require(epsilon >= 0.0, ErrorCode::Parameter, "weld epsilon must be >= 0");
  const int n = static_cast<int>(mesh.vertices.size());
  if (n == 0) return mesh;

  UnionFind uf(n);
  const double eps_sq = epsilon * epsilon;

  // Representative positions start at the vertices and move to cluster
  // centroids (over original vertices) after each merge pass. Iterating to a
  // fixpoint makes the operation idempotent.
  std::vector<Point3> rep_pos(mesh.vertices.begin(), mesh.vertices.end());
  for (int pass = 0; pass < n; ++pass) {
    std::vector<int> reps;
    reps.reserve(n);
    for (int i = 0; i < n; ++i) {
      if (uf.find(i) == i) reps.push_back(i);
    }

    bool merged = false;
    if (epsilon == 0.0) {
      std::map<std::array<double, 3>, int> seen;
      for (int r : reps) {
        const Point3& p = rep_pos[r];
        auto [it, inserted] = seen.try_emplace({p.x, p.y, p.z}, r);
        if (!inserted) {
          uf.unite(it->second, r);
          merged = true;
        }
      }
    } else {
      std::unordered_map<CellKey, std::vector<int>, CellKeyHash> grid;
      grid.reserve(reps.size() * 2);
      auto cell_of = [&](const Point3& p) {
        return CellKey{static_cast<std::int64_t>(std::floor(p.x / epsilon)),
                       static_cast<std::int64_t>(std::floor(p.y / epsilon)),
                       static_cast<std::int64_t>(std::floor(p.z / epsilon))};
      };
      for (int r : reps) grid[cell_of(rep_pos[r])].push_back(r);
      for (int r : reps) {
        const CellKey c = cell_of(rep_pos[r]);
        for (std::int64_t dx = -1; dx <= 1; ++dx) {
          for (std::int64_t dy = -1; dy <= 1; ++dy) {
            for (std::int64_t dz = -1; dz <= 1; ++dz) {
              const auto it = grid.find({c.x + dx, c.y + dy, c.z + dz});
              if (it == grid.end()) continue;
              for (int other : it->second) {
                if (other >= r) continue;
                if (uf.find(other) == uf.find(r)) continue;
                if (distance_sq(rep_pos[other], rep_pos[r]) <= eps_sq) {
                  uf.unite(other, r);
                  merged = true;
                }
              }
            }
          }
        }
      }
    }
    if (!merged) break;

    // Recompute representative positions as centroids over original vertices.
    std::vector<Point3> sum(n, Point3{0, 0, 0});
    std::vector<int> count(n, 0);
    for (int i = 0; i < n; ++i) {
      const int r = uf.find(i);
      sum[r] += mesh.vertices[i];
      ++count[r];
    }
    for (int i = 0; i < n; ++i) {
      if (count[i] > 0) rep_pos[i] = sum[i] / static_cast<double>(count[i]);
    }
  }

  TriMesh out;
  std::vector<int> remap(n, -1);
  for (int i = 0; i < n; ++i) {
    const int r = uf.find(i);
    if (remap[r] < 0) {
      remap[r] = static_cast<int>(out.vertices.size());
      out.vertices.push_back(rep_pos[r]);
    }
    remap[i] = remap[r];
  }
  for (const auto& f : mesh.faces) {
    const std::array<int, 3> g{remap[f[0]], remap[f[1]], remap[f[2]]};
    if (g[0] == g[1] || g[1] == g[2] || g[0] == g[2]) continue;
    out.faces.push_back(g);
  }
  return out;
}

double edge_sq_sum(const TriMesh& mesh) {
  double sum = 0.0;
  for (const auto& [a, b] : mesh.edges()) {
    sum += distance_sq(mesh.vertices[a], mesh.vertices[b]);
  }
  return sum;
}

}  // namespace ca
