#include "srld/dynamics.hpp"

#include "srld/rng.hpp"
#include "srld/stein.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>

namespace srld {

ChainKind parse_chain_kind(const std::string& name) {
  if (name == "langevin") return ChainKind::langevin;
  if (name == "srld") return ChainKind::srld;
  if (name == "general") return ChainKind::general;
  throw std::invalid_argument(
      "unknown method '" + name + "' (expected langevin, srld or general)");
}

const char* to_string(ChainKind kind) {
  switch (kind) {
    case ChainKind::langevin:
      return "langevin";
    case ChainKind::srld:
      return "srld";
    default:
      return "general";
  }
}

void validate(const SamplerConfig& cfg, ChainKind kind) {
  if (!(cfg.step_size > 0.0))
    throw std::invalid_argument("SamplerConfig.step_size must be > 0, got " +
                                std::to_string(cfg.step_size));
  if (cfg.alpha < 0.0)
    throw std::invalid_argument("SamplerConfig.alpha must be >= 0, got " +
                                std::to_string(cfg.alpha));
  if (cfg.window_size < 1)
    throw std::invalid_argument("SamplerConfig.window_size must be >= 1");
  if (cfg.thinning < 1)
    throw std::invalid_argument("SamplerConfig.thinning must be >= 1");
  if (cfg.total_steps < 1)
    throw std::invalid_argument("SamplerConfig.total_steps must be >= 1");
  if (cfg.keep_every < 1)
    throw std::invalid_argument("SamplerConfig.keep_every must be >= 1");
  const bool needs_second_phase =
      kind == ChainKind::srld ||
      (kind == ChainKind::general && cfg.alpha > 0.0);
  if (needs_second_phase && cfg.total_steps <= cfg.burnin_steps())
    throw std::invalid_argument(
        "SamplerConfig.total_steps must exceed the burn-in length M*c_eta = " +
        std::to_string(cfg.burnin_steps()) +
        ", got " + std::to_string(cfg.total_steps));
}

GeneralDynamicsSpec::GeneralDynamicsSpec(Eigen::MatrixXd diffusion,
                                         Eigen::MatrixXd curl)
    : diffusion_(std::move(diffusion)), curl_(std::move(curl)) {
  const Eigen::Index d = diffusion_.rows();
  if (diffusion_.cols() != d || curl_.rows() != d || curl_.cols() != d)
    throw std::invalid_argument(
        "GeneralDynamicsSpec: D and Q must be square with equal dimensions");
  const double scale = std::max(1.0, diffusion_.cwiseAbs().maxCoeff());
  if ((diffusion_ - diffusion_.transpose()).cwiseAbs().maxCoeff() >
      1e-12 * scale)
    throw std::invalid_argument(
        "GeneralDynamicsSpec: diffusion matrix D must be symmetric");
  const double qscale = std::max(1.0, curl_.cwiseAbs().maxCoeff());
  if ((curl_ + curl_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * qscale)
    throw std::invalid_argument(
        "GeneralDynamicsSpec: curl matrix Q must be skew-symmetric");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(diffusion_);
  if (es.info() != Eigen::Success)
    throw std::invalid_argument(
        "GeneralDynamicsSpec: eigendecomposition of D failed");
  const Eigen::VectorXd evals = es.eigenvalues();
  const double lambda_max = std::max(0.0, evals.maxCoeff());
  if (evals.minCoeff() < -1e-10 * std::max(1.0, lambda_max))
    throw std::invalid_argument(
        "GeneralDynamicsSpec: D is not positive semi-definite (min "
        "eigenvalue " +
        std::to_string(evals.minCoeff()) + ")");

  drift_ = diffusion_ + curl_;

  const bool d_diagonal =
      diffusion_.cwiseAbs().sum() == diffusion_.diagonal().cwiseAbs().sum();
  const bool q_zero = curl_.cwiseAbs().maxCoeff() == 0.0;
  if (d_diagonal) {
    // exact square root, no eigenbasis round-off
    sqrt_d_diag_ = diffusion_.diagonal().cwiseMax(0.0).cwiseSqrt();
    sqrt_d_ = sqrt_d_diag_.asDiagonal();
  } else {
    const Eigen::VectorXd sqrt_vals = evals.cwiseMax(0.0).cwiseSqrt();
    sqrt_d_ = es.eigenvectors() * sqrt_vals.asDiagonal() *
              es.eigenvectors().transpose();
  }
  elementwise_ = d_diagonal && q_zero;
  diag_noise_ = d_diagonal;
  if (d_diagonal) drift_diag_ = diffusion_.diagonal();
}

Eigen::VectorXd GeneralDynamicsSpec::apply_drift(
    const Eigen::VectorXd& grad) const {
  if (elementwise_) return drift_diag_.cwiseProduct(grad);
  return drift_ * grad;
}

Eigen::VectorXd GeneralDynamicsSpec::transform_noise(
    const Eigen::VectorXd& noise) const {
  if (diag_noise_) return sqrt_d_diag_.cwiseProduct(noise);
  return sqrt_d_ * noise;
}

namespace {

void check_step_inputs(const Eigen::VectorXd& theta,
                       const Eigen::VectorXd& noise, const TargetModel& target,
                       const char* op) {
  if (theta.size() != target.dim || noise.size() != target.dim)
    throw std::invalid_argument(std::string(op) + ": dimension mismatch");
  if (!theta.allFinite() || !noise.allFinite())
    throw std::invalid_argument(std::string(op) + ": non-finite input");
}

}  // namespace

Eigen::VectorXd langevin_step(const Eigen::VectorXd& theta,
                              const TargetModel& target, double eta,
                              const Eigen::VectorXd& noise) {
  check_step_inputs(theta, noise, target, "langevin_step");
  if (eta < 0.0)
    throw std::invalid_argument("langevin_step: eta must be >= 0");
  return theta - eta * target.grad(theta) + std::sqrt(2.0 * eta) * noise;
}

Eigen::VectorXd srld_step(const Eigen::VectorXd& theta,
                          const HistoryWindow& window,
                          const TargetModel& target, const SamplerConfig& cfg,
                          const Eigen::VectorXd& noise, StepMeta* meta) {
  check_step_inputs(theta, noise, target, "srld_step");
  if (!window.full())
    throw std::logic_error(
        "srld_step: history window holds " + std::to_string(window.pushed()) +
        " states but needs " + std::to_string(window.capacity()));
  if (cfg.alpha == 0.0) {
    // exact reduction to Langevin, no velocity evaluation
    if (meta != nullptr) {
      const Eigen::VectorXd g = target.grad(theta);
      meta->grad_norm = g.norm();
      meta->drift_norm = meta->grad_norm;
    }
    return langevin_step(theta, target, cfg.step_size, noise);
  }
  std::vector<Eigen::VectorXd> past;
  window.thinned_into(past);
  const MedianBandwidth bw = resolve_bandwidth(cfg.bandwidth, past);
  const Eigen::VectorXd g = target.grad(theta);
  const Eigen::VectorXd vel =
      velocity(theta, EmpiricalMeasure{past}, target, bw.sigma);
  const Eigen::VectorXd drift = -g + cfg.alpha * vel;
  if (meta != nullptr) {
    meta->grad_norm = g.norm();
    meta->velocity_norm = vel.norm();
    meta->bandwidth = bw.sigma;
    meta->drift_norm = drift.norm();
  }
  return theta + cfg.step_size * drift +
         std::sqrt(2.0 * cfg.step_size) * noise;
}

Eigen::VectorXd general_step(const Eigen::VectorXd& theta,
                             const GeneralDynamicsSpec& spec,
                             const TargetModel& target, double eta,
                             double alpha, const HistoryWindow* window,
                             const BandwidthPolicy& bandwidth,
                             const Eigen::VectorXd& noise, StepMeta* meta) {
  check_step_inputs(theta, noise, target, "general_step");
  if (eta < 0.0)
    throw std::invalid_argument("general_step: eta must be >= 0");
  const double s = std::sqrt(2.0 * eta);
  const Eigen::VectorXd g = target.grad(theta);
  const Eigen::VectorXd drift_part = spec.apply_drift(g);  // Gamma = 0
  if (window == nullptr || alpha == 0.0) {
    if (meta != nullptr) {
      meta->grad_norm = g.norm();
      meta->drift_norm = drift_part.norm();
    }
    return theta - eta * drift_part + s * spec.transform_noise(noise);
  }
  if (!window->full())
    throw std::logic_error("general_step: history window underfilled");
  std::vector<Eigen::VectorXd> past;
  window->thinned_into(past);
  const MedianBandwidth bw = resolve_bandwidth(bandwidth, past);
  const Eigen::VectorXd vel =
      velocity(theta, EmpiricalMeasure{past}, target, bw.sigma);
  if (meta != nullptr) {
    meta->grad_norm = g.norm();
    meta->velocity_norm = vel.norm();
    meta->bandwidth = bw.sigma;
    meta->drift_norm = (drift_part - alpha * vel).norm();
  }
  return theta - eta * drift_part + (eta * alpha) * vel +
         s * spec.transform_noise(noise);
}

Trace run_chain(ChainKind kind, const TargetModel& target,
                const SamplerConfig& cfg, const Eigen::VectorXd& theta0,
                const GeneralDynamicsSpec* dq) {
  validate(cfg, kind);
  if (kind == ChainKind::general && dq == nullptr)
    throw std::invalid_argument(
        "run_chain: general dynamics requires a GeneralDynamicsSpec");
  if (theta0.size() != target.dim)
    throw std::invalid_argument("run_chain: theta0 dimension " +
                                std::to_string(theta0.size()) +
                                " does not match target dimension " +
                                std::to_string(target.dim));
  if (!theta0.allFinite())
    throw std::invalid_argument("run_chain: theta0 is not finite");

  const Eigen::Index d = target.dim;
  const Eigen::Index burnin = cfg.burnin_steps();
  NormalStream noise(derive_seed(cfg.seed, stream_tag::chain_noise));
  HistoryWindow window(cfg.window_size, cfg.thinning);

  Trace trace;
  trace.burnin_steps = burnin;
  trace.states.reserve(static_cast<std::size_t>(cfg.total_steps) + 1);
  trace.meta.reserve(static_cast<std::size_t>(cfg.total_steps));
  trace.states.push_back(theta0);

  Eigen::VectorXd theta = theta0;
  Eigen::VectorXd e(d);
  for (Eigen::Index k = 0; k < cfg.total_steps; ++k) {
    noise.fill(e);
    StepMeta meta;
    meta.phase = k < burnin ? Phase::burnin : Phase::repulsive;
    const bool repulse =
        k >= burnin && cfg.alpha > 0.0 && kind != ChainKind::langevin;
    Eigen::VectorXd next;
    switch (kind) {
      case ChainKind::langevin: {
        const Eigen::VectorXd g = target.grad(theta);
        meta.grad_norm = g.norm();
        meta.drift_norm = meta.grad_norm;
        next = theta - cfg.step_size * g +
               std::sqrt(2.0 * cfg.step_size) * e;
        break;
      }
      case ChainKind::srld: {
        if (repulse) {
          next = srld_step(theta, window, target, cfg, e, &meta);
        } else {
          const Eigen::VectorXd g = target.grad(theta);
          meta.grad_norm = g.norm();
          meta.drift_norm = meta.grad_norm;
          next = theta - cfg.step_size * g +
                 std::sqrt(2.0 * cfg.step_size) * e;
        }
        break;
      }
      case ChainKind::general: {
        next = general_step(theta, *dq, target, cfg.step_size, cfg.alpha,
                            repulse ? &window : nullptr, cfg.bandwidth, e,
                            &meta);
        break;
      }
    }
    if (!next.allFinite())
      throw ChainDivergence(
          k + 1, std::string(to_string(kind)) + " chain on " + target.name +
                     " produced a non-finite state at iteration " +
                     std::to_string(k + 1));
    window.push(theta);
    trace.meta.push_back(meta);
    trace.states.push_back(next);
    theta = std::move(next);
  }
  return trace;
}

Eigen::MatrixXd svgd_run(const TargetModel& target, Eigen::Index n_particles,
                         Eigen::Index steps, double eta,
                         const BandwidthPolicy& bandwidth,
                         std::uint64_t seed) {
  if (n_particles < 1)
    throw std::invalid_argument("svgd_run: need at least one particle");
  if (steps < 0 || eta < 0.0)
    throw std::invalid_argument("svgd_run: steps and eta must be >= 0");
  const Eigen::Index d = target.dim;
  NormalStream rng(derive_seed(seed, stream_tag::svgd_init));
  std::vector<Eigen::VectorXd> particles(
      static_cast<std::size_t>(n_particles));
  for (auto& p : particles) p = rng.vector(d);

  std::vector<Eigen::VectorXd> vels(static_cast<std::size_t>(n_particles));
  const EmpiricalMeasure measure{particles};
  for (Eigen::Index step = 0; step < steps; ++step) {
    const MedianBandwidth bw = resolve_bandwidth(bandwidth, particles);
    for (std::size_t i = 0; i < particles.size(); ++i)
      vels[i] = velocity(particles[i], measure, target, bw.sigma);
    for (std::size_t i = 0; i < particles.size(); ++i) {
      particles[i] += eta * vels[i];
      if (!particles[i].allFinite())
        throw ChainDivergence(step + 1,
                              "svgd on " + target.name +
                                  " produced a non-finite particle at "
                                  "iteration " +
                                  std::to_string(step + 1));
    }
  }
  Eigen::MatrixXd out(n_particles, d);
  for (Eigen::Index i = 0; i < n_particles; ++i)
    out.row(i) = particles[static_cast<std::size_t>(i)].transpose();
  return out;
}

AutoAlpha auto_alpha(const Trace& burnin, const TargetModel& target,
                     const SamplerConfig& cfg) {
  const Eigen::Index full = cfg.burnin_steps();
  if (burnin.size() < full + 1)
    throw std::invalid_argument(
        "auto_alpha: burn-in trace holds " + std::to_string(burnin.size()) +
        " states but the first phase needs " + std::to_string(full + 1));
  double grad_sum = 0.0;
  double vel_sum = 0.0;
  std::vector<Eigen::VectorXd> past;
  // Windows are partial until k reaches M*c_eta; steps before the first
  // thinned sample exists contribute nothing.
  for (Eigen::Index k = cfg.thinning; k <= full; ++k) {
    const Eigen::Index available = std::min(cfg.window_size, k / cfg.thinning);
    past.resize(static_cast<std::size_t>(available));
    for (Eigen::Index j = 1; j <= available; ++j)
      past[static_cast<std::size_t>(j - 1)] =
          burnin.states[static_cast<std::size_t>(k - j * cfg.thinning)];
    const Eigen::VectorXd& theta = burnin.states[static_cast<std::size_t>(k)];
    grad_sum += target.grad(theta).norm();
    const MedianBandwidth bw = resolve_bandwidth(cfg.bandwidth, past);
    vel_sum +=
        velocity(theta, EmpiricalMeasure{past}, target, bw.sigma).norm();
  }
  if (grad_sum == 0.0) return {0.0, true};
  if (vel_sum == 0.0)
    throw std::runtime_error(
        "auto_alpha: repulsive velocities vanished over the burn-in window; "
        "choose a fixed alpha instead");
  return {grad_sum / vel_sum, false};
}

std::pair<Trace, Trace> coupled_runs(const TargetModel& target,
                                     ChainKind kindA, SamplerConfig cfgA,
                                     ChainKind kindB, SamplerConfig cfgB,
                                     const Eigen::VectorXd& theta0,
                                     std::uint64_t shared_seed) {
  if (cfgA.total_steps != cfgB.total_steps)
    throw std::invalid_argument(
        "coupled_runs: both configs must share total_steps");
  cfgA.seed = shared_seed;
  cfgB.seed = shared_seed;
  Trace a = run_chain(kindA, target, cfgA, theta0);
  Trace b = run_chain(kindB, target, cfgB, theta0);
  return {std::move(a), std::move(b)};
}

Eigen::VectorXd default_init(const TargetModel& target, std::uint64_t seed) {
  NormalStream rng(derive_seed(seed, stream_tag::chain_init));
  return rng.vector(target.dim);
}

MatchedStepSize match_step_sizes(const TargetModel& target,
                                 const SamplerConfig& cfg_srld,
                                 Eigen::Index pilot_steps) {
  if (pilot_steps < 1000)
    throw std::invalid_argument(
        "match_step_sizes: pilot needs at least 1000 post-burn-in steps");
  SamplerConfig pilot = cfg_srld;
  pilot.total_steps = cfg_srld.burnin_steps() + pilot_steps;
  pilot.seed = derive_seed(cfg_srld.seed, stream_tag::pilot);
  const Trace trace =
      run_chain(ChainKind::srld, target, pilot, default_init(target, pilot.seed));
  double drift_sum = 0.0;
  double grad_sum = 0.0;
  for (Eigen::Index k = pilot.burnin_steps(); k < trace.size() - 1; ++k) {
    const StepMeta& m = trace.meta[static_cast<std::size_t>(k)];
    drift_sum += m.drift_norm;
    grad_sum += m.grad_norm;
  }
  if (drift_sum == 0.0 || grad_sum == 0.0)
    throw std::runtime_error(
        "match_step_sizes: degenerate pilot (vanishing drift or gradient "
        "norms)");
  const double ratio = drift_sum / grad_sum;
  return {cfg_srld.step_size * ratio, ratio};
}

}  // namespace srld
