#pragma once

#include "rfsearch/world/camera.hpp"
#include "rfsearch/world/scene.hpp"
#include "rfsearch/world/voxel_grid.hpp"

namespace rfsearch::world {

inline constexpr double kWorkspaceMargin = 0.1;  // meters, matches the planner's state box

// Depth integration against the ground-truth scene. Classification is purely
// per-voxel: a voxel center inside the frustum becomes Occupied when the ray
// through it first hits an object inside that same voxel, Free when the
// center lies strictly before the first hit, and is left untouched behind
// hits. Occupied is never downgraded, so the observed set only grows.
inline void integrate_observation(VoxelGrid& grid, const CameraPose& pose,
                                  const Scene& scene) {
  if (!pose.valid()) throw Error("invalid camera pose");
  if (!grid.bounds().inflated(kWorkspaceMargin).contains(pose.position))
    throw PoseOutOfBounds("camera position outside workspace bounds");

  const Vec3 cam = pose.position;
  const double nudge = grid.resolution() * 1e-6;
  const auto& dims = grid.dims();

  for (int z = 0; z < dims[2]; ++z) {
    for (int y = 0; y < dims[1]; ++y) {
      for (int x = 0; x < dims[0]; ++x) {
        const Vec3 v = grid.center(x, y, z);
        if (!pose.contains(v)) continue;
        Vec3 dir = v - cam;
        const double t_v = dir.norm();
        if (t_v < 1e-12) continue;
        dir /= t_v;

        const size_t idx = grid.index(x, y, z);
        const auto hit = scene.first_hit(cam, dir);
        if (hit) {
          const Vec3 hit_point = cam + (hit->t + nudge) * dir;
          const auto hit_voxel = grid.locate(hit_point);
          if (hit_voxel && grid.index((*hit_voxel)[0], (*hit_voxel)[1], (*hit_voxel)[2]) == idx) {
            grid.set_state(idx, CellState::Occupied);
            continue;
          }
        }
        if (!hit || t_v < hit->t) {
          if (grid.state(idx) != CellState::Occupied)
            grid.set_state(idx, CellState::Free);
        }
      }
    }
  }
}

}  // namespace rfsearch::world
