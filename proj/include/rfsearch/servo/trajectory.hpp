#pragma once

#include <vector>

#include "rfsearch/common.hpp"
#include "rfsearch/world/camera.hpp"
#include "rfsearch/world/voxel_grid.hpp"

namespace rfsearch::servo {

// Free-flying sensor/gripper pose: position plus axis-angle orientation,
// with additive dynamics x_{t+1} = x_t + u_t.
using RobotState = Vec6;

struct ControlLimits {
  double u_max_pos = 0.15;  // meters per step
  double u_max_rot = 0.3;   // radians per step
};

inline Vec6 clamp_control(const Vec6& u, const ControlLimits& lim) {
  Vec6 out = u;
  double pn = out.head<3>().norm();
  if (pn > lim.u_max_pos) out.head<3>() *= lim.u_max_pos / pn;
  double rn = out.tail<3>().norm();
  if (rn > lim.u_max_rot) out.tail<3>() *= lim.u_max_rot / rn;
  return out;
}

// Feasible-state box: workspace plus margin for positions, the pi-ball for
// the axis-angle part, and rejection of steps into observed-occupied space.
struct StateBounds {
  Aabb workspace;
  double margin = 0.1;
  const world::VoxelGrid* grid = nullptr;  // optional collision source

  Vec6 clamp(const Vec6& x) const {
    Vec6 out = x;
    Aabb box = workspace.inflated(margin);
    out.head<3>() = out.head<3>().cwiseMax(box.min).cwiseMin(box.max);
    double rn = out.tail<3>().norm();
    if (rn > M_PI) out.tail<3>() *= M_PI / rn;
    return out;
  }

  bool position_blocked(const Vec3& p) const {
    if (!grid) return false;
    auto v = grid->locate(p);
    return v && grid->state((*v)[0], (*v)[1], (*v)[2]) == world::CellState::Occupied;
  }

  // Additive step with clamping; a step landing inside occupied space keeps
  // the previous position (orientation still applies).
  Vec6 step(const Vec6& x, const Vec6& u) const {
    Vec6 next = clamp(x + u);
    if (position_blocked(next.head<3>())) next.head<3>() = x.head<3>();
    return next;
  }
};

inline std::vector<Vec6> rollout(const Vec6& start, const std::vector<Vec6>& controls,
                                 const StateBounds& bounds) {
  std::vector<Vec6> poses;
  poses.reserve(controls.size() + 1);
  poses.push_back(bounds.clamp(start));
  for (const auto& u : controls) poses.push_back(bounds.step(poses.back(), u));
  return poses;
}

inline constexpr double kApproachStandoff = 0.15;  // meters short of the RF point

// Straight-line seed toward the RF estimate: positions march along the
// segment from the start to a standoff point before p, per-step deltas
// clamped into the control box; orientation eases toward facing p.
inline std::vector<Vec6> initial_trajectory(const Vec6& start, const Vec3& p, int T,
                                            const ControlLimits& lim = {}) {
  if (T < 1) throw Error("initial_trajectory needs T >= 1");
  const Vec3 start_pos = start.head<3>();
  Vec3 to_target = p - start_pos;
  const double dist = to_target.norm();

  Vec3 goal_pos = start_pos;
  if (dist > kApproachStandoff)
    goal_pos = p - kApproachStandoff * (to_target / dist);

  Vec3 aa_start = start.tail<3>();
  Vec3 face_dir = p - goal_pos;
  Vec3 aa_goal = face_dir.norm() > 1e-9
                     ? world::axis_angle_from_quat(world::look_at(face_dir))
                     : aa_start;

  std::vector<Vec6> waypoints;
  waypoints.reserve(T + 1);
  waypoints.push_back(start);
  for (int k = 0; k < T; ++k) {
    const Vec6& prev = waypoints.back();
    int remaining = T - k;
    Vec3 dp = (goal_pos - prev.head<3>()) / double(remaining);
    double dpn = dp.norm();
    if (dpn > lim.u_max_pos) dp *= lim.u_max_pos / dpn;
    Vec3 da = (aa_goal - prev.tail<3>()) / double(remaining);
    double dan = da.norm();
    if (dan > lim.u_max_rot) da *= lim.u_max_rot / dan;
    Vec6 next;
    next.head<3>() = prev.head<3>() + dp;
    next.tail<3>() = prev.tail<3>() + da;
    waypoints.push_back(next);
  }
  return waypoints;
}

inline std::vector<Vec6> controls_from_waypoints(const std::vector<Vec6>& waypoints) {
  std::vector<Vec6> controls;
  controls.reserve(waypoints.size() - 1);
  for (size_t i = 0; i + 1 < waypoints.size(); ++i)
    controls.push_back(waypoints[i + 1] - waypoints[i]);
  return controls;
}

}  // namespace rfsearch::servo
