#pragma once

#include <cmath>

#include "rfsearch/common.hpp"

namespace rfsearch::belief {

struct ObservabilityParams {
  double kappa = 50.0;             // sigmoid slope, 1/m
  double image_axis_weight = -0.5; // multiplier on the image-axis distance
};

// Sigmoid-smoothed indicator that a region mean is inside the camera's
// visible volume. sd is the signed distance (positive inside), rho_img the
// image-plane distance to the optical axis.
inline double observability(double sd, double rho_img,
                            const ObservabilityParams& params) {
  return 1.0 / (1.0 + std::exp(-params.kappa *
                               (sd + params.image_axis_weight * rho_img)));
}

inline MatX symmetrized(const MatX& m) { return 0.5 * (m + m.transpose()); }

// Covariance prediction: A Sigma A^T + Q Q^T.
inline MatX predict(const MatX& sigma, const MatX& A, const MatX& Q) {
  const auto n = sigma.rows();
  if (sigma.cols() != n || A.rows() != n || A.cols() != n || Q.rows() != n)
    throw ShapeError("predict: dimension mismatch");
  return symmetrized(A * sigma * A.transpose() + Q * Q.transpose());
}

// Observability-gated Kalman gain:
//   K = Sigma- H^T D [D H Sigma- H^T D + R R^T]^-1 D.
// Throws NearSingularInnovation when the bracket is numerically singular;
// the caller may retry once with jitter added to the bracket diagonal.
inline MatX gain(const MatX& sigma_pred, const MatX& H, const MatX& R,
                 const MatX& delta, double jitter = 0.0) {
  const auto n = sigma_pred.rows();
  const auto m = H.rows();
  if (sigma_pred.cols() != n || H.cols() != n || R.rows() != m ||
      R.cols() != m || delta.rows() != m || delta.cols() != m)
    throw ShapeError("gain: dimension mismatch");

  MatX bracket = delta * H * sigma_pred * H.transpose() * delta + R * R.transpose();
  if (jitter > 0.0) bracket += jitter * MatX::Identity(m, m);
  Eigen::LDLT<MatX> ldlt(symmetrized(bracket));
  if (ldlt.info() != Eigen::Success || ldlt.rcond() < 1e-12)
    throw NearSingularInnovation("innovation matrix near singular");
  return sigma_pred * H.transpose() * delta * ldlt.solve(delta);
}

// Covariance correction: (I - K H) Sigma-.
inline MatX update(const MatX& sigma_pred, const MatX& K, const MatX& H) {
  const auto n = sigma_pred.rows();
  if (sigma_pred.cols() != n || K.rows() != n || H.cols() != n ||
      K.cols() != H.rows())
    throw ShapeError("update: dimension mismatch");
  return symmetrized((MatX::Identity(n, n) - K * H) * sigma_pred);
}

}  // namespace rfsearch::belief
