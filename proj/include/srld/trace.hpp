// Chain trace: every state in iteration order plus per-step metadata.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <vector>

namespace srld {

enum class Phase { burnin, repulsive };

inline const char* to_string(Phase p) {
  return p == Phase::burnin ? "burnin" : "repulsive";
}

// Metadata for the step from state k to state k+1.  Quantities that a step
// does not compute (e.g. the velocity norm of a Langevin step) are NaN.
struct StepMeta {
  double grad_norm = std::numeric_limits<double>::quiet_NaN();
  double velocity_norm = std::numeric_limits<double>::quiet_NaN();
  double bandwidth = std::numeric_limits<double>::quiet_NaN();
  // norm of the full drift vector (the eta coefficient in the update)
  double drift_norm = std::numeric_limits<double>::quiet_NaN();
  Phase phase = Phase::burnin;
};

struct Trace {
  // states[k] = theta_k, k = 0..total_steps (indices implicit and strictly
  // increasing by construction)
  std::vector<Eigen::VectorXd> states;
  // meta[k] describes the step theta_k -> theta_{k+1}
  std::vector<StepMeta> meta;
  Eigen::Index burnin_steps = 0;  // M * c_eta of the config that produced it

  Eigen::Index dim() const {
    return states.empty() ? 0 : states.front().size();
  }
  Eigen::Index size() const {
    return static_cast<Eigen::Index>(states.size());
  }
};

// States strictly after the burn-in boundary (k > burnin_steps, i.e. states
// produced by repulsive-phase steps), thinned by keep_every; rows of the
// returned matrix are samples.
inline Eigen::MatrixXd post_burnin_samples(const Trace& trace,
                                           Eigen::Index keep_every = 1) {
  std::vector<Eigen::Index> kept;
  for (Eigen::Index k = trace.burnin_steps + 1; k < trace.size();
       k += keep_every)
    kept.push_back(k);
  Eigen::MatrixXd out(static_cast<Eigen::Index>(kept.size()), trace.dim());
  for (std::size_t i = 0; i < kept.size(); ++i)
    out.row(static_cast<Eigen::Index>(i)) =
        trace.states[static_cast<std::size_t>(kept[i])].transpose();
  return out;
}

// One coordinate of the chain as a time series over all states.
inline Eigen::VectorXd state_series(const Trace& trace, Eigen::Index coord) {
  Eigen::VectorXd s(trace.size());
  for (Eigen::Index k = 0; k < trace.size(); ++k)
    s[k] = trace.states[static_cast<std::size_t>(k)][coord];
  return s;
}

}  // namespace srld
