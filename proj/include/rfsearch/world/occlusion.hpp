#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "rfsearch/world/voxel_grid.hpp"

namespace rfsearch::world {

struct OccludedRegion {
  std::vector<size_t> voxel_ids;
  Vec3 mean = Vec3::Zero();
  Mat3 cov_seed = Mat3::Zero();
};

// Sample mean and population covariance of a point set, symmetrized.
inline std::pair<Vec3, Mat3> fit_gaussian(const std::vector<Vec3>& points) {
  if (points.empty()) throw EmptyRegion("fit_gaussian on empty point set");
  Vec3 mean = Vec3::Zero();
  for (const auto& p : points) mean += p;
  mean /= double(points.size());
  Mat3 cov = Mat3::Zero();
  for (const auto& p : points) {
    Vec3 d = p - mean;
    cov += d * d.transpose();
  }
  cov /= double(points.size());
  return {mean, 0.5 * (cov + cov.transpose())};
}

inline double mahalanobis(const Vec3& p, const Vec3& mean, const Mat3& cov) {
  Mat3 c = cov + 1e-9 * Mat3::Identity();
  Vec3 d = p - mean;
  return std::sqrt(d.dot(c.ldlt().solve(d)));
}

// Connected components (6-connectivity) of Unknown voxels above the table
// layer, largest first, truncated to max_regions. When an RF estimate is
// supplied the component nearest to it in Mahalanobis distance is moved to
// index 0: that component carries the target's weight in the planner.
inline std::vector<OccludedRegion> extract_occluded_regions(
    const VoxelGrid& grid, int max_regions,
    std::optional<Vec3> rf_estimate = std::nullopt) {
  if (max_regions < 1) throw Error("max_regions must be >= 1");
  const auto& dims = grid.dims();
  std::vector<std::uint8_t> visited(grid.size(), 0);
  std::vector<OccludedRegion> regions;

  std::vector<size_t> stack;
  for (int z = 1; z < dims[2]; ++z) {
    for (int y = 0; y < dims[1]; ++y) {
      for (int x = 0; x < dims[0]; ++x) {
        size_t seed = grid.index(x, y, z);
        if (visited[seed] || grid.state(seed) != CellState::Unknown) continue;
        OccludedRegion region;
        stack.assign(1, seed);
        visited[seed] = 1;
        while (!stack.empty()) {
          size_t idx = stack.back();
          stack.pop_back();
          region.voxel_ids.push_back(idx);
          auto c = grid.coords(idx);
          constexpr int off[6][3] = {{1, 0, 0},  {-1, 0, 0}, {0, 1, 0},
                                     {0, -1, 0}, {0, 0, 1},  {0, 0, -1}};
          for (const auto& o : off) {
            int nx = c[0] + o[0], ny = c[1] + o[1], nz = c[2] + o[2];
            if (nz < 1 || !grid.in_bounds(nx, ny, nz)) continue;
            size_t nidx = grid.index(nx, ny, nz);
            if (visited[nidx] || grid.state(nidx) != CellState::Unknown) continue;
            visited[nidx] = 1;
            stack.push_back(nidx);
          }
        }
        regions.push_back(std::move(region));
      }
    }
  }

  std::sort(regions.begin(), regions.end(),
            [](const OccludedRegion& a, const OccludedRegion& b) {
              if (a.voxel_ids.size() != b.voxel_ids.size())
                return a.voxel_ids.size() > b.voxel_ids.size();
              return a.voxel_ids.front() < b.voxel_ids.front();
            });
  if (int(regions.size()) > max_regions) regions.resize(max_regions);

  for (auto& r : regions) {
    std::vector<Vec3> centers;
    centers.reserve(r.voxel_ids.size());
    for (size_t idx : r.voxel_ids) centers.push_back(grid.center(idx));
    std::tie(r.mean, r.cov_seed) = fit_gaussian(centers);
  }

  if (rf_estimate && regions.size() > 1) {
    size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < regions.size(); ++i) {
      double d = mahalanobis(*rf_estimate, regions[i].mean, regions[i].cov_seed);
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    if (best != 0) std::rotate(regions.begin(), regions.begin() + best,
                               regions.begin() + best + 1);
  }
  return regions;
}

// Fraction of observed voxels among those whose centers fall inside the box
// of the given dimensions centered at p.
inline double visible_fraction(const VoxelGrid& grid, const Vec3& p,
                               const Vec3& vicinity_dims) {
  if ((vicinity_dims.array() <= 0.0).any())
    throw Error("vicinity box must have positive dims");
  Aabb box{p - 0.5 * vicinity_dims, p + 0.5 * vicinity_dims};
  const auto& dims = grid.dims();
  size_t total = 0, seen = 0;
  // Restrict the scan to the voxel range overlapping the box.
  auto lo = (box.min - grid.origin()) / grid.resolution();
  auto hi = (box.max - grid.origin()) / grid.resolution();
  int x0 = std::max(0, int(std::floor(lo.x() - 0.5)));
  int y0 = std::max(0, int(std::floor(lo.y() - 0.5)));
  int z0 = std::max(0, int(std::floor(lo.z() - 0.5)));
  int x1 = std::min(dims[0] - 1, int(std::ceil(hi.x())));
  int y1 = std::min(dims[1] - 1, int(std::ceil(hi.y())));
  int z1 = std::min(dims[2] - 1, int(std::ceil(hi.z())));
  for (int z = z0; z <= z1; ++z)
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x) {
        if (!box.contains(grid.center(x, y, z))) continue;
        ++total;
        if (grid.observed(grid.index(x, y, z))) ++seen;
      }
  if (total == 0) throw EmptyVicinity("vicinity box contains no voxel centers");
  return double(seen) / double(total);
}

}  // namespace rfsearch::world
