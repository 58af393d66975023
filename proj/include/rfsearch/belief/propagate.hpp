#pragma once

#include <vector>

#include "rfsearch/belief/ekf.hpp"
#include "rfsearch/world/camera.hpp"
#include "rfsearch/world/visibility.hpp"

namespace rfsearch::belief {

struct RegionBelief {
  Vec3 mean = Vec3::Zero();
  Mat3 cov = Mat3::Zero();
};

struct BeliefState {
  Eigen::Matrix<double, 6, 6> robot_cov = 1e-4 * Eigen::Matrix<double, 6, 6>::Identity();
  std::vector<RegionBelief> regions;
  int t = 0;

  int dim() const { return 6 + 3 * int(regions.size()); }

  MatX full_cov() const {
    MatX sigma = MatX::Zero(dim(), dim());
    sigma.topLeftCorner<6, 6>() = robot_cov;
    for (size_t m = 0; m < regions.size(); ++m)
      sigma.block<3, 3>(6 + 3 * int(m), 6 + 3 * int(m)) = regions[m].cov;
    return sigma;
  }

  double region_trace(size_t m) const { return regions[m].cov.trace(); }
};

// Everything the horizon propagation needs besides the belief itself: the
// sensor geometry, the frontier patches frozen at plan time, and the noise
// scales. Cross-covariances between blocks are dropped after each update,
// matching the block-diagonal initial covariance.
struct PropagationModel {
  world::CameraPose camera_intrinsics;  // fov/near/far template
  std::vector<world::FrontierPatch> patches;
  ObservabilityParams observability;
  double sigma_dynamics = 0.01;   // per-step robot pose noise std
  double sigma_pose_meas = 1e-3;  // pose measurement noise std
  double sigma_region_meas = 0.02;  // region measurement noise std (camera coords)

  world::CameraPose camera_at(const Vec6& robot_state) const {
    world::CameraPose pose = camera_intrinsics;
    pose.position = robot_state.head<3>();
    pose.orientation = world::quat_from_axis_angle(robot_state.tail<3>());
    return pose;
  }
};

namespace detail {

// Observation: the robot pose plus each region mean in camera coordinates.
inline VecX observe(const Vec6& robot_state, const std::vector<Vec3>& means,
                    const PropagationModel& model) {
  VecX z(6 + 3 * int(means.size()));
  z.head<6>() = robot_state;
  const auto cam = model.camera_at(robot_state);
  for (size_t m = 0; m < means.size(); ++m)
    z.segment<3>(6 + 3 * int(m)) = cam.to_camera(means[m]);
  return z;
}

inline MatX numeric_measurement_jacobian(const Vec6& robot_state,
                                         const std::vector<Vec3>& means,
                                         const PropagationModel& model,
                                         double step = 1e-5) {
  const int n = 6 + 3 * int(means.size());
  MatX H(n, n);
  VecX state(n);
  state.head<6>() = robot_state;
  for (size_t m = 0; m < means.size(); ++m) state.segment<3>(6 + 3 * int(m)) = means[m];

  auto eval = [&](const VecX& s) {
    std::vector<Vec3> ms(means.size());
    for (size_t m = 0; m < means.size(); ++m) ms[m] = s.segment<3>(6 + 3 * int(m));
    return observe(s.head<6>(), ms, model);
  };

  for (int j = 0; j < n; ++j) {
    VecX plus = state, minus = state;
    plus[j] += step;
    minus[j] -= step;
    H.col(j) = (eval(plus) - eval(minus)) / (2.0 * step);
  }
  return H;
}

inline BeliefState unpack(const MatX& sigma, const BeliefState& like, int t) {
  BeliefState out = like;
  out.robot_cov = sigma.topLeftCorner<6, 6>();
  for (size_t m = 0; m < out.regions.size(); ++m)
    out.regions[m].cov = sigma.block<3, 3>(6 + 3 * int(m), 6 + 3 * int(m));
  out.t = t;
  return out;
}

}  // namespace detail

struct StepDiagnostics {
  std::vector<double> phi;  // per-region observability factors
};

// One gated EKF covariance step at the given robot state. The full
// (6+3M)-dim matrices are assembled, the update applied, and the result
// pinched back to block-diagonal form.
inline BeliefState propagate_step(const BeliefState& belief, const Vec6& robot_state,
                                  const PropagationModel& model,
                                  StepDiagnostics* diag = nullptr) {
  const int n = belief.dim();
  const int M = int(belief.regions.size());

  MatX A = MatX::Identity(n, n);
  MatX Q = MatX::Zero(n, n);
  Q.topLeftCorner<6, 6>() = model.sigma_dynamics * Eigen::Matrix<double, 6, 6>::Identity();
  MatX sigma_pred = predict(belief.full_cov(), A, Q);

  const auto cam = model.camera_at(robot_state);
  const auto regions_vis = world::visible_regions(cam, model.patches);

  MatX delta = MatX::Identity(n, n);
  if (diag) diag->phi.assign(M, 0.0);
  for (int m = 0; m < M; ++m) {
    const Vec3& mean = belief.regions[m].mean;
    double sd = world::signed_distance(mean, regions_vis);
    double rho = cam.image_axis_distance(mean);
    double phi = observability(sd, rho, model.observability);
    delta.block<3, 3>(6 + 3 * m, 6 + 3 * m) = phi * Mat3::Identity();
    if (diag) diag->phi[m] = phi;
  }

  std::vector<Vec3> means(M);
  for (int m = 0; m < M; ++m) means[m] = belief.regions[m].mean;
  MatX H = detail::numeric_measurement_jacobian(robot_state, means, model);
  MatX R = MatX::Zero(n, n);
  R.topLeftCorner<6, 6>() = model.sigma_pose_meas * Eigen::Matrix<double, 6, 6>::Identity();
  for (int m = 0; m < M; ++m)
    R.block<3, 3>(6 + 3 * m, 6 + 3 * m) = model.sigma_region_meas * Mat3::Identity();

  MatX K;
  try {
    K = gain(sigma_pred, H, R, delta);
  } catch (const NearSingularInnovation&) {
    K = gain(sigma_pred, H, R, delta, 1e-9);
  }
  MatX sigma_post = update(sigma_pred, K, H);

  // Pinch to block-diagonal: preserves PSD and the trace.
  MatX pinched = MatX::Zero(n, n);
  pinched.topLeftCorner<6, 6>() = sigma_post.topLeftCorner<6, 6>();
  for (int m = 0; m < M; ++m)
    pinched.block<3, 3>(6 + 3 * m, 6 + 3 * m) = sigma_post.block<3, 3>(6 + 3 * m, 6 + 3 * m);

  return detail::unpack(pinched, belief, belief.t + 1);
}

// Belief trajectory along a pose sequence (one entry per pose).
inline std::vector<BeliefState> propagate_horizon(const BeliefState& belief,
                                                  const std::vector<Vec6>& poses,
                                                  const PropagationModel& model) {
  if (poses.empty()) throw Error("propagate_horizon needs at least one pose");
  std::vector<BeliefState> out;
  out.reserve(poses.size());
  BeliefState cur = belief;
  for (const auto& pose : poses) {
    cur = propagate_step(cur, pose, model);
    out.push_back(cur);
  }
  return out;
}

}  // namespace rfsearch::belief
