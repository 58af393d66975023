#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "rfsearch/world/camera.hpp"
#include "rfsearch/world/occlusion.hpp"
#include "rfsearch/world/voxel_grid.hpp"

namespace rfsearch::world {

// Inward-oriented half-space: inside iff normal . x >= offset.
struct HalfSpace {
  Vec3 normal;
  double offset;

  double margin(const Vec3& x) const { return normal.dot(x) - offset; }

  static HalfSpace through(const Vec3& n_unit, const Vec3& point) {
    return {n_unit, n_unit.dot(point)};
  }
};

// Intersection of half-spaces. For interior points the distance to the
// boundary is the minimum plane margin (exact for unit normals); exterior
// distance is computed by Dykstra projection onto the intersection.
struct ConvexRegion {
  std::vector<HalfSpace> planes;

  bool contains(const Vec3& x, double tol = 0.0) const {
    for (const auto& h : planes)
      if (h.margin(x) < -tol) return false;
    return true;
  }

  double min_margin(const Vec3& x) const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& h : planes) m = std::min(m, h.margin(x));
    return m;
  }

  Vec3 project(const Vec3& x, int max_passes = 80) const {
    Vec3 p = x;
    std::vector<Vec3> increments(planes.size(), Vec3::Zero());
    for (int pass = 0; pass < max_passes; ++pass) {
      double moved = 0.0;
      for (size_t i = 0; i < planes.size(); ++i) {
        Vec3 y = p + increments[i];
        double m = planes[i].margin(y);
        Vec3 proj = m >= 0.0 ? y : Vec3(y - m * planes[i].normal);
        increments[i] = y - proj;
        moved += (proj - p).squaredNorm();
        p = proj;
      }
      if (moved < 1e-20) break;
    }
    return p;
  }

  double exterior_distance(const Vec3& x) const { return (x - project(x)).norm(); }
};

inline ConvexRegion frustum_region(const CameraPose& pose) {
  ConvexRegion r;
  const Vec3 c = pose.position;
  const Vec3 fwd = pose.forward(), right = pose.right(), up = pose.up();
  r.planes.push_back(HalfSpace::through(fwd, c + pose.near * fwd));
  r.planes.push_back(HalfSpace::through(-fwd, c + pose.far * fwd));
  const double ah = 0.5 * pose.fov_h, av = 0.5 * pose.fov_v;
  r.planes.push_back(HalfSpace::through(-std::cos(ah) * right + std::sin(ah) * fwd, c));
  r.planes.push_back(HalfSpace::through(std::cos(ah) * right + std::sin(ah) * fwd, c));
  r.planes.push_back(HalfSpace::through(-std::cos(av) * up + std::sin(av) * fwd, c));
  r.planes.push_back(HalfSpace::through(std::cos(av) * up + std::sin(av) * fwd, c));
  return r;
}

// Strictly interior probe lattice used for the cheap nonemptiness test of
// clipped regions. Slivers thinner than the lattice spacing get dropped,
// which the sigmoid downstream tolerates.
inline std::vector<Vec3> frustum_probes(const CameraPose& pose) {
  std::vector<Vec3> pts;
  const double th = std::tan(0.5 * pose.fov_h), tv = std::tan(0.5 * pose.fov_v);
  for (double f : {0.05, 0.3, 0.55, 0.8, 0.98}) {
    double z = pose.near + f * (pose.far - pose.near);
    for (double sx : {-0.9, -0.45, 0.0, 0.45, 0.9})
      for (double sy : {-0.9, -0.45, 0.0, 0.45, 0.9})
        pts.push_back(pose.to_world(Vec3(sx * th * z, sy * tv * z, z)));
  }
  return pts;
}

// Rectangular stand-in for an occlusion frontier: the boundary surface
// between observed-free space and an unknown region.
struct FrontierPatch {
  Vec3 center = Vec3::Zero();
  Vec3 axis_u = Vec3::UnitX();
  Vec3 axis_v = Vec3::UnitY();
  double half_u = 0.0;
  double half_v = 0.0;
  Vec3 normal = Vec3::UnitZ();  // toward the free side
};

// Shadow of the patch rectangle as seen from `eye`: half-space bundle whose
// intersection is the occluded wedge. Empty when the eye is on the unknown
// side or degenerate.
inline std::vector<HalfSpace> shadow_wedge(const Vec3& eye, const FrontierPatch& p) {
  const double side = p.normal.dot(eye - p.center);
  if (side <= 1e-9) return {};
  std::vector<HalfSpace> wedge;
  wedge.push_back(HalfSpace::through(-p.normal, p.center));
  const Vec3 corners[4] = {
      p.center - p.half_u * p.axis_u - p.half_v * p.axis_v,
      p.center + p.half_u * p.axis_u - p.half_v * p.axis_v,
      p.center + p.half_u * p.axis_u + p.half_v * p.axis_v,
      p.center - p.half_u * p.axis_u + p.half_v * p.axis_v};
  // Reference point inside the shadow: the eye->center ray continued past
  // the patch.
  const Vec3 behind = p.center + (p.center - eye);
  for (int i = 0; i < 4; ++i) {
    const Vec3& a = corners[i];
    const Vec3& b = corners[(i + 1) % 4];
    Vec3 n = (a - eye).cross(b - eye);
    double len = n.norm();
    if (len < 1e-12) return {};
    n /= len;
    HalfSpace h = HalfSpace::through(n, eye);
    if (h.margin(behind) < 0.0) h = HalfSpace::through(-n, eye);
    wedge.push_back(h);
  }
  return wedge;
}

// Visible volume for a pose: the camera frustum minus the shadow wedges of
// the frontier patches, decomposed into at most `cap` convex regions.
inline std::vector<ConvexRegion> visible_regions(
    const CameraPose& pose, const std::vector<FrontierPatch>& patches,
    int cap = 8) {
  std::vector<ConvexRegion> regions{frustum_region(pose)};
  const auto probes = frustum_probes(pose);

  auto probe_radius = [&](const ConvexRegion& r) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& q : probes) best = std::max(best, r.min_margin(q));
    return best;
  };

  for (const auto& patch : patches) {
    const auto wedge = shadow_wedge(pose.position, patch);
    if (wedge.empty()) continue;
    std::vector<std::pair<double, ConvexRegion>> next;
    for (const auto& r : regions) {
      for (const auto& w : wedge) {
        ConvexRegion clipped = r;
        clipped.planes.push_back({-w.normal, -w.offset});
        double rad = probe_radius(clipped);
        if (rad > 1e-9) next.emplace_back(rad, std::move(clipped));
      }
    }
    std::sort(next.begin(), next.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });
    if (int(next.size()) > cap) next.resize(cap);
    regions.clear();
    for (auto& [rad, r] : next) regions.push_back(std::move(r));
    if (regions.empty()) break;  // everything in shadow
  }
  return regions;
}

// Positive inside the visible volume (distance to the nearest boundary of
// the containing region), negative outside (minus the distance to the
// nearest region).
inline double signed_distance(const Vec3& x, const std::vector<ConvexRegion>& regions) {
  double inside = -std::numeric_limits<double>::infinity();
  bool contained = false;
  for (const auto& r : regions) {
    double m = r.min_margin(x);
    if (m >= 0.0) {
      contained = true;
      inside = std::max(inside, m);
    }
  }
  if (contained) return inside;
  if (regions.empty()) return -1e3;  // everything in shadow
  double nearest = std::numeric_limits<double>::infinity();
  for (const auto& r : regions) nearest = std::min(nearest, r.exterior_distance(x));
  return -nearest;
}

inline double signed_distance_to_fov(const Vec3& x, const CameraPose& pose,
                                     const std::vector<FrontierPatch>& patches = {}) {
  return signed_distance(x, visible_regions(pose, patches));
}

// Fit one rectangular patch to the free/unknown boundary of an occluded
// region: PCA plane of the boundary voxel centers, normal oriented toward
// the free side. Returns nullopt when the region has no observed boundary.
inline std::optional<FrontierPatch> fit_frontier_patch(const VoxelGrid& grid,
                                                       const OccludedRegion& region) {
  std::vector<Vec3> boundary;
  Vec3 free_dir = Vec3::Zero();
  constexpr int off[6][3] = {{1, 0, 0},  {-1, 0, 0}, {0, 1, 0},
                             {0, -1, 0}, {0, 0, 1},  {0, 0, -1}};
  for (size_t idx : region.voxel_ids) {
    auto c = grid.coords(idx);
    bool is_boundary = false;
    for (const auto& o : off) {
      int nx = c[0] + o[0], ny = c[1] + o[1], nz = c[2] + o[2];
      if (!grid.in_bounds(nx, ny, nz)) continue;
      if (grid.state(nx, ny, nz) == CellState::Free) {
        is_boundary = true;
        free_dir += Vec3(o[0], o[1], o[2]);
      }
    }
    if (is_boundary) boundary.push_back(grid.center(c[0], c[1], c[2]));
  }
  if (boundary.size() < 4 || free_dir.norm() < 1e-12) return std::nullopt;

  auto [centroid, cov] = fit_gaussian(boundary);
  Eigen::SelfAdjointEigenSolver<Mat3> eig(cov);
  FrontierPatch patch;
  patch.center = centroid;
  patch.normal = eig.eigenvectors().col(0);
  if (patch.normal.dot(free_dir) < 0.0) patch.normal = -patch.normal;
  patch.axis_u = eig.eigenvectors().col(2);
  patch.axis_v = eig.eigenvectors().col(1);
  double hu = 0.0, hv = 0.0;
  for (const auto& b : boundary) {
    hu = std::max(hu, std::abs(patch.axis_u.dot(b - centroid)));
    hv = std::max(hv, std::abs(patch.axis_v.dot(b - centroid)));
  }
  patch.half_u = hu + 0.5 * grid.resolution();
  patch.half_v = hv + 0.5 * grid.resolution();
  return patch;
}

inline std::vector<FrontierPatch> extract_frontier_patches(
    const VoxelGrid& grid, const std::vector<OccludedRegion>& regions,
    int max_patches = 4) {
  std::vector<FrontierPatch> patches;
  for (const auto& r : regions) {
    if (int(patches.size()) >= max_patches) break;
    if (auto p = fit_frontier_patch(grid, r)) patches.push_back(*p);
  }
  return patches;
}

}  // namespace rfsearch::world
