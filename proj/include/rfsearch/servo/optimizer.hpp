#pragma once

#include <vector>

#include "rfsearch/servo/cost.hpp"
#include "rfsearch/servo/trajectory.hpp"

namespace rfsearch::servo {

struct OptimizerOptions {
  int max_iterations = 200;
  double gradient_step = 1e-6;      // forward-difference step on controls
  double min_improvement = 1e-10;   // absolute acceptance threshold
  double convergence_rel = 1e-4;    // relative stall threshold
  int convergence_window = 2;       // stalled iterations before stopping
};

struct PlanResult {
  std::vector<Vec6> controls;  // length T; the terminal control is zero
  double cost = 0.0;
  bool converged = false;
  int iterations = 0;
};

// Expected cost of a control stack under the frozen planning model: the
// deterministic nominal rollout with EKF covariance propagation.
inline double expected_cost(const Vec6& start, const std::vector<Vec6>& controls,
                            const belief::BeliefState& belief,
                            const belief::PropagationModel& model,
                            const StateBounds& bounds, const CostWeights& weights,
                            int replan_index, bool rf_biased = true) {
  const auto poses = rollout(start, controls, bounds);
  auto covs_of = [](const belief::BeliefState& b) {
    std::vector<Mat3> covs(b.regions.size());
    for (size_t m = 0; m < b.regions.size(); ++m) covs[m] = b.regions[m].cov;
    return covs;
  };

  double total = stage_cost(controls.empty() ? Vec6::Zero().eval() : controls.front(),
                            covs_of(belief), weights, replan_index, rf_biased);
  belief::BeliefState cur = belief;
  for (size_t t = 1; t < poses.size(); ++t) {
    cur = belief::propagate_step(cur, poses[t], model);
    Vec6 u = t < controls.size() ? controls[t] : Vec6::Zero().eval();
    total += stage_cost(u, covs_of(cur), weights, replan_index, rf_biased);
  }
  return total;
}

inline std::vector<Vec6> project_controls(const std::vector<Vec6>& controls,
                                          const ControlLimits& lim) {
  std::vector<Vec6> out = controls;
  for (auto& u : out) u = clamp_control(u, lim);
  return out;
}

// Projected gradient descent with backtracking line search over the control
// stack. Monotone by construction: only strictly improving steps are taken,
// so the result never costs more than the (projected) seed.
inline PlanResult optimize_trajectory(const belief::BeliefState& belief,
                                      const belief::PropagationModel& model,
                                      const CostWeights& weights, const Vec6& start,
                                      const std::vector<Vec6>& init_controls,
                                      const StateBounds& bounds,
                                      const ControlLimits& lim, int replan_index,
                                      bool rf_biased = true,
                                      const OptimizerOptions& opts = {}) {
  if (!weights.valid()) throw Error("invalid cost weights");
  const int T = int(init_controls.size());
  if (T < 1) throw Error("optimize_trajectory needs at least one control");

  auto objective = [&](const std::vector<Vec6>& U) {
    return expected_cost(start, U, belief, model, bounds, weights, replan_index,
                         rf_biased);
  };

  PlanResult res;
  res.controls = project_controls(init_controls, lim);
  res.cost = objective(res.controls);

  double step_size = 0.05;
  int stalled = 0;
  std::vector<Vec6> grad(T);

  for (res.iterations = 0; res.iterations < opts.max_iterations; ++res.iterations) {
    const double f0 = res.cost;
    for (int t = 0; t < T; ++t) {
      for (int a = 0; a < 6; ++a) {
        std::vector<Vec6> probe = res.controls;
        probe[t][a] += opts.gradient_step;
        grad[t][a] = (objective(probe) - f0) / opts.gradient_step;
      }
    }
    double gnorm2 = 0.0;
    for (const auto& g : grad) gnorm2 += g.squaredNorm();
    if (gnorm2 < 1e-16) {
      res.converged = true;
      break;
    }

    bool accepted = false;
    double eta = step_size;
    for (int ls = 0; ls < 10; ++ls) {
      std::vector<Vec6> cand(T);
      for (int t = 0; t < T; ++t)
        cand[t] = clamp_control(res.controls[t] - eta * grad[t], lim);
      double fc = objective(cand);
      if (fc < f0 - opts.min_improvement) {
        res.controls = std::move(cand);
        res.cost = fc;
        accepted = true;
        step_size = std::min(eta * 1.5, 1.0);
        break;
      }
      eta *= 0.5;
    }

    if (!accepted) {
      res.converged = true;  // no descent direction within the line search
      break;
    }
    if (f0 - res.cost < opts.convergence_rel * (std::abs(f0) + 1e-12)) {
      if (++stalled >= opts.convergence_window) {
        res.converged = true;
        break;
      }
    } else {
      stalled = 0;
    }
  }
  return res;
}

}  // namespace rfsearch::servo
