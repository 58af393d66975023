#pragma once

#include <Eigen/Dense>
#include <random>
#include <stdexcept>
#include <string>

namespace rfsearch {

using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat3 = Eigen::Matrix3d;
using MatX = Eigen::MatrixXd;
using VecX = Eigen::VectorXd;

// All stochastic components draw from an explicitly seeded engine so that
// episodes are reproducible and parallel runs never share state.
using Rng = std::mt19937_64;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PoseOutOfBounds : Error { using Error::Error; };
struct EmptyRegion : Error { using Error::Error; };
struct EmptyVicinity : Error { using Error::Error; };
struct TagNotFound : Error { using Error::Error; };
struct InsufficientTrack : Error { using Error::Error; };
struct ShapeError : Error { using Error::Error; };
struct NearSingularInnovation : Error { using Error::Error; };
struct RfOutOfWorkspace : Error { using Error::Error; };
struct InvalidAffordance : Error { using Error::Error; };
struct DivergedTraining : Error { using Error::Error; };
struct ScenarioInfeasible : Error { using Error::Error; };

// Axis-aligned box, the workhorse shape for objects and workspace bounds.
struct Aabb {
  Vec3 min = Vec3::Zero();
  Vec3 max = Vec3::Zero();

  Vec3 center() const { return 0.5 * (min + max); }
  Vec3 extent() const { return max - min; }

  bool contains(const Vec3& p) const {
    return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
  }

  Aabb inflated(double r) const {
    return {min - Vec3::Constant(r), max + Vec3::Constant(r)};
  }

  bool intersects(const Aabb& o) const {
    return (min.array() <= o.max.array()).all() &&
           (max.array() >= o.min.array()).all();
  }
};

inline double draw_normal(Rng& rng, double mean = 0.0, double stddev = 1.0) {
  std::normal_distribution<double> d(mean, stddev);
  return d(rng);
}

inline Vec3 draw_normal3(Rng& rng, double stddev) {
  return {draw_normal(rng, 0.0, stddev), draw_normal(rng, 0.0, stddev),
          draw_normal(rng, 0.0, stddev)};
}

inline double draw_uniform(Rng& rng, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  return d(rng);
}

}  // namespace rfsearch
