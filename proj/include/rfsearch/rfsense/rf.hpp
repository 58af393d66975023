#pragma once

#include <vector>

#include "rfsearch/common.hpp"
#include "rfsearch/world/scene.hpp"

namespace rfsearch::rfsense {

struct RfEstimate {
  int tag_id = 0;
  Vec3 p = Vec3::Zero();
  double sigma = 0.0;
  int timestamp = 0;
};

struct RfTrack {
  int tag_id = 0;
  std::vector<RfEstimate> history;

  void push(const RfEstimate& e) {
    if (!history.empty() && e.timestamp <= history.back().timestamp)
      throw Error("RfTrack timestamps must be strictly increasing");
    history.push_back(e);
  }
};

struct RfSensorConfig {
  double sigma = 0.01;  // meters, per-axis noise std
};

// Noisy position of the tagged object's center. RF penetrates occlusions,
// so the estimate is available regardless of visibility.
inline RfEstimate localize(int tag_id, const world::Scene& scene, Rng& rng,
                           const RfSensorConfig& cfg = {}, int timestamp = 0) {
  const auto* obj = scene.find_by_tag(tag_id);
  if (!obj) throw TagNotFound("no object carries RFID " + std::to_string(tag_id));
  RfEstimate e;
  e.tag_id = tag_id;
  e.sigma = cfg.sigma;
  e.timestamp = timestamp;
  e.p = obj->aabb.center() + draw_normal3(rng, cfg.sigma);
  return e;
}

inline double default_pickup_tol(double sigma) { return 3.0 * sigma + 0.005; }

// True when the tag displacement across the lift matches the gripper
// displacement within tolerance, i.e. the object moved with the hand.
// Estimates on each side of the lift are averaged; the tracker runs
// continuously, so each side normally holds at least two samples.
inline bool confirm_pickup(const RfTrack& track, const Vec3& gripper_delta,
                           double tol, int lift_timestamp) {
  Vec3 before = Vec3::Zero(), after = Vec3::Zero();
  int n_before = 0, n_after = 0;
  for (const auto& e : track.history) {
    if (e.timestamp <= lift_timestamp) {
      before += e.p;
      ++n_before;
    } else {
      after += e.p;
      ++n_after;
    }
  }
  if (n_before == 0 || n_after == 0)
    throw InsufficientTrack("confirm_pickup needs estimates on both sides of the lift");
  return ((after / n_after - before / n_before) - gripper_delta).norm() <= tol;
}

// Convenience for a track whose last entry is the only post-lift estimate.
inline bool confirm_pickup(const RfTrack& track, const Vec3& gripper_delta,
                           double tol) {
  if (track.history.size() < 2)
    throw InsufficientTrack("confirm_pickup needs estimates on both sides of the lift");
  return confirm_pickup(track, gripper_delta, tol,
                        track.history[track.history.size() - 2].timestamp);
}

}  // namespace rfsearch::rfsense
