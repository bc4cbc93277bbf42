// Chain steppers and full runs: Langevin, two-phase self-repulsive Langevin
// (SRLD), the general D/Q dynamics family, the SVGD baseline, plus the
// alpha auto-estimate, coupled-noise paired runs and step-size matching.

#pragma once

#include "srld/history.hpp"
#include "srld/kernel.hpp"
#include "srld/targets.hpp"
#include "srld/trace.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace srld {

struct SamplerConfig {
  double step_size = 1e-3;          // eta
  double alpha = 10.0;              // repulsion strength, >= 0
  Eigen::Index window_size = 10;    // M
  Eigen::Index thinning = 100;      // c_eta, iterations between past samples
  Eigen::Index total_steps = 20000;
  BandwidthPolicy bandwidth = BandwidthPolicy::median();
  std::uint64_t seed = 0;
  Eigen::Index keep_every = 1;  // reporting only, never affects the dynamics

  Eigen::Index burnin_steps() const { return window_size * thinning; }
};

enum class ChainKind { langevin, srld, general };

ChainKind parse_chain_kind(const std::string& name);
const char* to_string(ChainKind kind);

// Thrown when a chain state stops being finite.
class ChainDivergence : public std::runtime_error {
 public:
  ChainDivergence(Eigen::Index iteration, const std::string& what)
      : std::runtime_error(what), iteration_(iteration) {}
  Eigen::Index iteration() const { return iteration_; }

 private:
  Eigen::Index iteration_;
};

// Constant-coefficient general dynamics: drift [D + Q] grad V - Gamma with
// D positive semi-definite, Q skew-symmetric, and Gamma = 0 since the
// matrices are constant.  sqrt(D) is computed once at construction.
class GeneralDynamicsSpec {
 public:
  GeneralDynamicsSpec(Eigen::MatrixXd diffusion, Eigen::MatrixXd curl);

  const Eigen::MatrixXd& diffusion() const { return diffusion_; }
  const Eigen::MatrixXd& curl() const { return curl_; }
  const Eigen::MatrixXd& drift_matrix() const { return drift_; }     // D + Q
  const Eigen::MatrixXd& sqrt_diffusion() const { return sqrt_d_; }  // D^{1/2}

  Eigen::VectorXd apply_drift(const Eigen::VectorXd& grad) const;
  Eigen::VectorXd transform_noise(const Eigen::VectorXd& noise) const;

 private:
  Eigen::MatrixXd diffusion_, curl_, drift_, sqrt_d_;
  bool elementwise_ = false;  // D diagonal and Q zero: exact cwise fast path
  bool diag_noise_ = false;   // D diagonal: exact element-wise sqrt(D)
  Eigen::VectorXd drift_diag_, sqrt_d_diag_;
};

// One Euler step of Langevin dynamics: theta - eta grad V + sqrt(2 eta) e.
Eigen::VectorXd langevin_step(const Eigen::VectorXd& theta,
                              const TargetModel& target, double eta,
                              const Eigen::VectorXd& noise);

// One repulsive-phase SRLD step.  The window must already hold M * c_eta
// states; the bandwidth policy is resolved over the M thinned past samples
// (the current state is not included).  With alpha = 0 the velocity is never
// evaluated and the result is bit-identical to langevin_step.
Eigen::VectorXd srld_step(const Eigen::VectorXd& theta,
                          const HistoryWindow& window,
                          const TargetModel& target, const SamplerConfig& cfg,
                          const Eigen::VectorXd& noise,
                          StepMeta* meta = nullptr);

// One step of the general dynamics; `window` enables the repulsive term and
// may be null for the plain (or burn-in) dynamics.
Eigen::VectorXd general_step(const Eigen::VectorXd& theta,
                             const GeneralDynamicsSpec& spec,
                             const TargetModel& target, double eta,
                             double alpha, const HistoryWindow* window,
                             const BandwidthPolicy& bandwidth,
                             const Eigen::VectorXd& noise,
                             StepMeta* meta = nullptr);

// Full two-phase run.  Phase 1 (k < M*c_eta) is the base dynamics; phase 2
// adds the repulsive velocity when alpha > 0.  Every state is pushed into
// the sliding window each iteration.  One standard-normal vector is drawn
// per iteration regardless of branch, so chains with equal seeds consume
// identical noise sequences.
Trace run_chain(ChainKind kind, const TargetModel& target,
                const SamplerConfig& cfg, const Eigen::VectorXd& theta0,
                const GeneralDynamicsSpec* dq = nullptr);

// Standard-normal initial state derived from (seed, init tag).
Eigen::VectorXd default_init(const TargetModel& target, std::uint64_t seed);

// SVGD baseline: synchronous update of all particles against the current
// particle set (self included); returns the final n_particles x dim set.
Eigen::MatrixXd svgd_run(const TargetModel& target, Eigen::Index n_particles,
                         Eigen::Index steps, double eta,
                         const BandwidthPolicy& bandwidth, std::uint64_t seed);

struct AutoAlpha {
  double alpha = 0.0;
  bool degenerate = false;  // numerator was zero (gradient-free burn-in)
};

// Appendix-style balance estimate: sum |grad V| / sum |g| over burn-in
// states, with velocities evaluated retrospectively against each step's
// thinned window (partial windows while fewer than M past samples exist).
AutoAlpha auto_alpha(const Trace& burnin, const TargetModel& target,
                     const SamplerConfig& cfg);

// Both chains consume the identical noise sequence and initial state.
std::pair<Trace, Trace> coupled_runs(const TargetModel& target,
                                     ChainKind kindA, SamplerConfig cfgA,
                                     ChainKind kindB, SamplerConfig cfgB,
                                     const Eigen::VectorXd& theta0,
                                     std::uint64_t shared_seed);

struct MatchedStepSize {
  double eta_langevin = 0.0;
  double drift_ratio = 1.0;  // mean |[-grad V + alpha g]| / mean |grad V|
};

// Runs an SRLD pilot and scales the Langevin step size so both dynamics have
// the same expected drift magnitude per step.
MatchedStepSize match_step_sizes(const TargetModel& target,
                                 const SamplerConfig& cfg_srld,
                                 Eigen::Index pilot_steps);

void validate(const SamplerConfig& cfg, ChainKind kind);

}  // namespace srld
