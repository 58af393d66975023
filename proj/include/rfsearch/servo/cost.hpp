#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "rfsearch/belief/propagate.hpp"
#include "rfsearch/world/occlusion.hpp"

namespace rfsearch::servo {

struct CostWeights {
  double alpha = 1.0;        // control-effort weight
  double beta0 = 10.0;       // initial weight on the target region
  double beta_growth = 1.5;  // per-replan multiplier on beta0
  double beta_other = 1.0;   // weight on non-target regions

  bool valid() const {
    return alpha >= 0.0 && beta0 >= 0.0 && beta_other >= 0.0 && beta_growth >= 1.0;
  }
};

// Target-region weight ramp: geometric growth per replan, capped so the
// bias cannot overflow the cost scale.
inline double beta_schedule(int replan_index, const CostWeights& w) {
  if (replan_index < 0) throw Error("replan_index must be >= 0");
  double beta = w.beta0 * std::pow(w.beta_growth, replan_index);
  return std::min(beta, 1e4 * w.beta_other);
}

// Stage cost: alpha * |u|^2 + sum_m beta_t^m * trace(Sigma_t^m). Region 0
// carries the scheduled target weight, the rest the uniform weight. A
// uniform-beta variant (RF bias disabled) is selected with rf_biased=false.
inline double stage_cost(const Vec6& u, const std::vector<Mat3>& region_covs,
                         const CostWeights& w, int replan_index,
                         bool rf_biased = true) {
  double cost = w.alpha * u.squaredNorm();
  const double beta1 = rf_biased ? beta_schedule(replan_index, w) : w.beta_other;
  for (size_t m = 0; m < region_covs.size(); ++m)
    cost += (m == 0 ? beta1 : w.beta_other) * region_covs[m].trace();
  return cost;
}

struct TerminationConfig {
  double rho_sigma = 0.005;  // trace threshold (m^2)
  double rho_upsilon = 0.1;  // visible-fraction threshold
  Vec3 vicinity = Vec3(0.05, 0.05, 0.10);  // meters
};

enum class TerminationReason { None, TraceBelow, VicinityVisible };

struct TerminationResult {
  bool terminate = false;
  TerminationReason reason = TerminationReason::None;
  double trace = 0.0;
  double fraction = 0.0;
};

// Exploration halts when the target-region trace falls below rho_sigma or
// the observed fraction of the vicinity cube around the RF estimate exceeds
// rho_upsilon. Both comparisons are strict.
inline TerminationResult should_terminate(const belief::BeliefState& belief,
                                          const world::VoxelGrid& grid, const Vec3& p,
                                          const TerminationConfig& cfg = {}) {
  TerminationResult r;
  r.trace = belief.regions.empty() ? 0.0 : belief.regions[0].cov.trace();
  r.fraction = world::visible_fraction(grid, p, cfg.vicinity);
  if (r.trace < cfg.rho_sigma) {
    r.terminate = true;
    r.reason = TerminationReason::TraceBelow;
  } else if (r.fraction > cfg.rho_upsilon) {
    r.terminate = true;
    r.reason = TerminationReason::VicinityVisible;
  }
  return r;
}

}  // namespace rfsearch::servo
