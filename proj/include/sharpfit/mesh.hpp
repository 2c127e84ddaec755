#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "sharpfit/core.hpp"
#include "sharpfit/kdtree.hpp"

namespace sharpfit {

/// Principal curvatures at a vertex. kappa1 >= kappa2. Sign convention:
/// outward normals make a sphere positively curved.
struct CurvatureInfo {
  double kappa1 = 0.0;
  double kappa2 = 0.0;
  double gaussian_k = 0.0;  // kappa1 * kappa2
  double mean_h = 0.0;      // (kappa1 + kappa2) / 2
};

/// Similarity transform mapping normalized coordinates back to the original
/// frame: original = normalized * scale + center.
struct SimilarityTransform {
  Vec3 center = Vec3::Zero();
  double scale = 1.0;

  Vec3 to_original(const Vec3& p) const { return p * scale + center; }
  Vec3 to_normalized(const Vec3& p) const { return (p - center) / scale; }
};

/// Indexed triangle mesh. Immutable by convention after construction;
/// operations return new meshes.
struct TriMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;
  std::vector<Vec3> vertex_normals;
  std::vector<CurvatureInfo> curvatures;   // empty until estimate_curvatures
  std::vector<std::uint8_t> boundary_flag; // per vertex, set with curvatures
  int dropped_degenerate_faces = 0;        // counted at load

  bool has_curvatures() const { return curvatures.size() == vertices.size(); }

  Vec3 face_normal(int f) const {
    const auto& t = faces[std::size_t(f)];
    Vec3 e1 = vertices[std::size_t(t[1])] - vertices[std::size_t(t[0])];
    Vec3 e2 = vertices[std::size_t(t[2])] - vertices[std::size_t(t[0])];
    return e1.cross(e2);  // length == 2 * area
  }

  double face_area(int f) const { return 0.5 * face_normal(f).norm(); }

  double total_area() const {
    double a = 0.0;
    for (int f = 0; f < int(faces.size()); ++f) a += face_area(f);
    return a;
  }
};

inline void compute_vertex_normals(TriMesh& mesh) {
  mesh.vertex_normals.assign(mesh.vertices.size(), Vec3::Zero());
  for (int f = 0; f < int(mesh.faces.size()); ++f) {
    Vec3 an = mesh.face_normal(f);  // area-weighted
    for (int c = 0; c < 3; ++c) mesh.vertex_normals[std::size_t(mesh.faces[std::size_t(f)][c])] += an;
  }
  for (auto& n : mesh.vertex_normals) {
    double len = n.norm();
    if (len > 1e-20) {
      n /= len;
    } else {
      n = Vec3::UnitZ();  // unreferenced or fully degenerate fan
    }
  }
}

inline void bounding_box(const std::vector<Vec3>& pts, Vec3& mn, Vec3& mx) {
  if (pts.empty()) throw Error(ErrorKind::DegenerateMesh, "empty point set");
  mn = mx = pts[0];
  for (const Vec3& p : pts) {
    mn = mn.cwiseMin(p);
    mx = mx.cwiseMax(p);
  }
}

/// Euclidean length of the axis-aligned bounding-box diagonal.
inline double bbox_diagonal(const TriMesh& mesh) {
  Vec3 mn, mx;
  bounding_box(mesh.vertices, mn, mx);
  return (mx - mn).norm();
}

inline double bbox_diagonal(const std::vector<Vec3>& pts) {
  Vec3 mn, mx;
  bounding_box(pts, mn, mx);
  return (mx - mn).norm();
}

/// Center at the bbox midpoint and scale by half the bbox diagonal, so all
/// vertices land inside the closed unit ball. Returns the transform that
/// maps results back to the input frame.
inline std::pair<TriMesh, SimilarityTransform> normalize_unit_sphere(const TriMesh& mesh) {
  Vec3 mn, mx;
  bounding_box(mesh.vertices, mn, mx);
  SimilarityTransform t;
  t.center = 0.5 * (mn + mx);
  t.scale = 0.5 * (mx - mn).norm();
  if (t.scale <= 0.0)
    throw Error(ErrorKind::DegenerateMesh, "all vertices coincide; cannot normalize");
  TriMesh out = mesh;
  for (auto& v : out.vertices) v = t.to_normalized(v);
  compute_vertex_normals(out);
  return {std::move(out), t};
}

/// One-ring vertex adjacency (sorted, unique) plus per-vertex boundary flag.
struct VertexAdjacency {
  std::vector<std::vector<int>> neighbors;
  std::vector<std::uint8_t> boundary;
};

inline VertexAdjacency build_adjacency(const TriMesh& mesh) {
  VertexAdjacency adj;
  adj.neighbors.resize(mesh.vertices.size());
  // count undirected edge multiplicity to detect boundaries
  std::unordered_map<std::uint64_t, int> edge_count;
  auto key = [](int a, int b) {
    if (a > b) std::swap(a, b);
    return (std::uint64_t(std::uint32_t(a)) << 32) | std::uint32_t(b);
  };
  for (const auto& f : mesh.faces) {
    for (int c = 0; c < 3; ++c) {
      int a = f[std::size_t(c)], b = f[std::size_t((c + 1) % 3)];
      adj.neighbors[std::size_t(a)].push_back(b);
      adj.neighbors[std::size_t(b)].push_back(a);
      edge_count[key(a, b)]++;
    }
  }
  for (auto& nb : adj.neighbors) {
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
  }
  adj.boundary.assign(mesh.vertices.size(), 0);
  for (const auto& [k, cnt] : edge_count) {
    if (cnt == 1) {
      adj.boundary[std::size_t(int(k >> 32))] = 1;
      adj.boundary[std::size_t(int(k & 0xffffffffu))] = 1;
    }
  }
  return adj;
}

/// Closest point on triangle (a, b, c) to p. Ericson's barycentric region walk.
inline Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  Vec3 ab = b - a, ac = c - a, ap = p - a;
  double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return a;

  Vec3 bp = p - b;
  double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return b;

  double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
    double v = d1 / (d1 - d3);
    return a + v * ab;
  }

  Vec3 cp = p - c;
  double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return c;

  double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
    double w = d2 / (d2 - d6);
    return a + w * ac;
  }

  double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    return b + w * (c - b);
  }

  double denom = 1.0 / (va + vb + vc);
  double v = vb * denom, w = vc * denom;
  return a + v * ab + w * ac;
}

/// Point-to-mesh distance with a face-centroid kd-tree prefilter. Exact on
/// the candidate faces; `candidates` controls how many nearby faces are
/// checked (the nearest face is among them for reasonably uniform meshes).
class MeshDistance {
 public:
  explicit MeshDistance(const TriMesh& mesh, int candidates = 32)
      : mesh_(&mesh), candidates_(candidates) {
    std::vector<Vec3> centroids;
    centroids.reserve(mesh.faces.size());
    for (const auto& f : mesh.faces) {
      centroids.push_back((mesh.vertices[std::size_t(f[0])] + mesh.vertices[std::size_t(f[1])] +
                           mesh.vertices[std::size_t(f[2])]) /
                          3.0);
    }
    tree_ = KdTree(std::move(centroids));
  }

  double distance(const Vec3& p) const {
    auto cand = tree_.knn(p, candidates_);
    double best = std::numeric_limits<double>::max();
    for (int f : cand) {
      const auto& t = mesh_->faces[std::size_t(f)];
      Vec3 q = closest_point_on_triangle(p, mesh_->vertices[std::size_t(t[0])],
                                         mesh_->vertices[std::size_t(t[1])],
                                         mesh_->vertices[std::size_t(t[2])]);
      best = std::min(best, (q - p).norm());
    }
    return best;
  }

 private:
  const TriMesh* mesh_;
  int candidates_;
  KdTree tree_;
};

/// Merge vertices closer than `tol` (used by the STL loader and the
/// synthetic generators to stitch per-patch grids together).
inline TriMesh weld_vertices(const TriMesh& in, double tol) {
  TriMesh out;
  out.dropped_degenerate_faces = in.dropped_degenerate_faces;
  if (in.vertices.empty()) return out;
  double cell = std::max(tol, 1e-300);
  auto cell_key = [&](const Vec3& p, int dx, int dy, int dz) {
    auto q = [&](double x) { return std::int64_t(std::floor(x / cell)); };
    std::uint64_t h = 1469598103934665603ull;
    for (std::int64_t v : {q(p.x()) + dx, q(p.y()) + dy, q(p.z()) + dz}) {
      h ^= std::uint64_t(v);
      h *= 1099511628211ull;
    }
    return h;
  };
  std::unordered_map<std::uint64_t, std::vector<int>> grid;
  std::vector<int> remap(in.vertices.size(), -1);
  for (int i = 0; i < int(in.vertices.size()); ++i) {
    const Vec3& p = in.vertices[std::size_t(i)];
    int found = -1;
    for (int dx = -1; dx <= 1 && found < 0; ++dx)
      for (int dy = -1; dy <= 1 && found < 0; ++dy)
        for (int dz = -1; dz <= 1 && found < 0; ++dz) {
          auto it = grid.find(cell_key(p, dx, dy, dz));
          if (it == grid.end()) continue;
          for (int j : it->second) {
            if ((out.vertices[std::size_t(j)] - p).norm() <= tol) {
              found = j;
              break;
            }
          }
        }
    if (found < 0) {
      found = int(out.vertices.size());
      out.vertices.push_back(p);
      grid[cell_key(p, 0, 0, 0)].push_back(found);
    }
    remap[std::size_t(i)] = found;
  }
  for (const auto& f : in.faces) {
    std::array<int, 3> g = {remap[std::size_t(f[0])], remap[std::size_t(f[1])], remap[std::size_t(f[2])]};
    if (g[0] == g[1] || g[1] == g[2] || g[0] == g[2]) {
      out.dropped_degenerate_faces++;
      continue;
    }
    out.faces.push_back(g);
  }
  compute_vertex_normals(out);
  return out;
}

}  // namespace sharpfit
