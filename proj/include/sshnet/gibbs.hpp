#ifndef SSHNET_GIBBS_HPP_
#define SSHNET_GIBBS_HPP_

#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <vector>

#include <Eigen/Dense>

#include "sshnet/diagnostics.hpp"
#include "sshnet/distributions.hpp"
#include "sshnet/errors.hpp"
#include "sshnet/kernel.hpp"
#include "sshnet/marginal_likelihood.hpp"
#include "sshnet/parallel.hpp"
#include "sshnet/regressors.hpp"

namespace sshnet {

constexpr double kScaleFloor = 1e-300;
constexpr double kDrawCeiling = 1e300;

// Cached eigendecomposition M^T G_k^T G_k M = U diag(D) U^T for module k,
// together with W = M U and the Gram matrix G_k^T G_k.
struct ModulePrecomp {
  Eigen::MatrixXd U;
  Eigen::VectorXd D;
  Eigen::MatrixXd W;
  Eigen::MatrixXd gram;
};

inline ModulePrecomp precompute_module(const Eigen::Ref<const Eigen::MatrixXd>& G_k,
                                       const StableSplineKernel& kernel,
                                       Eigen::Index module_index = 0) {
  if (G_k.cols() != kernel.m()) {
    std::ostringstream os;
    os << "precompute_module: regressor " << module_index + 1 << " has "
       << G_k.cols() << " columns but m = " << kernel.m();
    throw ShapeError(os.str());
  }
  ModulePrecomp pc;
  pc.gram = G_k.transpose() * G_k;
  const auto M = kernel.factor().triangularView<Eigen::Lower>();
  Eigen::MatrixXd whitened = pc.gram * M;                         // G^T G M
  whitened = M.transpose() * whitened;                            // M^T G^T G M
  whitened = 0.5 * (whitened + whitened.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(whitened);
  if (eig.info() != Eigen::Success) {
    std::ostringstream os;
    os << "precompute_module: eigendecomposition failed for module "
       << module_index + 1;
    throw NumericalError(os.str());
  }
  pc.U = eig.eigenvectors();
  pc.D = eig.eigenvalues().cwiseMax(0.0);
  pc.W = M * pc.U;
  return pc;
}

// Posterior of theta_k given everything else, in factored form:
// mean = W (D + r I)^{-1} W^T b, covariance = A A^T with
// A = sigma W (D + r I)^{-1/2}, r = sigma2 / (tau2 lambda2_k),
// b = G_k^T (Y - sum_{j != k} G_j theta_j).
struct ThetaConditional {
  Eigen::VectorXd mean;
  Eigen::MatrixXd factor;
};

inline ThetaConditional theta_conditional(const ModulePrecomp& pc, double sigma2,
                                          double prior_scale,
                                          const Eigen::Ref<const Eigen::VectorXd>& b) {
  const double ratio = sigma2 / prior_scale;
  const Eigen::ArrayXd denom = pc.D.array() + ratio;
  ThetaConditional out;
  const Eigen::VectorXd c = pc.W.transpose() * b;
  out.mean = pc.W * (c.array() / denom).matrix();
  out.factor = pc.W * (std::sqrt(sigma2) * denom.rsqrt()).matrix().asDiagonal();
  return out;
}

// One Gibbs state. Column k of `thetas` is theta_k; knorm(k) caches
// ||theta_k||_K^2.
struct ChainState {
  Eigen::MatrixXd thetas;
  Eigen::VectorXd knorm;
  Eigen::VectorXd lambda2;
  Eigen::VectorXd nu;
  double tau2 = 1.0;
  double xi = 1.0;
  double sigma2 = 1.0;
  Residual residual;
};

// Inverse-gamma prior on sigma2. shape = scale = 0 is the Jeffreys prior
// d sigma2 / sigma2.
struct NoisePrior {
  double shape = 0.0;
  double scale = 0.0;
};

struct ChainConfig {
  std::int64_t n_iters = 20000;
  double burn_in_fraction = 0.25;
  std::int64_t thin = 10;
  double theta_init_value = 1e-4;
  double variance_init = 1.0;
  std::uint64_t seed = 0;
  std::optional<std::int64_t> evidence_stride;
  std::int64_t residual_refresh = 1000;
  bool store_theta_samples = false;
  // Test hook: only the impulse responses are resampled.
  bool freeze_hyperparameters = false;
  NoisePrior noise_prior;

  void validate() const {
    if (n_iters < 1) throw ParameterError("chain: n_iters must be >= 1");
    if (!(burn_in_fraction >= 0.0 && burn_in_fraction < 1.0)) {
      throw ParameterError("chain: burn_in_fraction must lie in [0, 1)");
    }
    if (thin < 1) throw ParameterError("chain: thin must be >= 1");
    if (!(variance_init > 0.0)) {
      throw ParameterError("chain: variance_init must be positive");
    }
    if (evidence_stride && *evidence_stride < 1) {
      throw ParameterError("chain: evidence_stride must be >= 1");
    }
    if (residual_refresh < 1) {
      throw ParameterError("chain: residual_refresh must be >= 1");
    }
    if (noise_prior.shape < 0.0 || noise_prior.scale < 0.0) {
      throw ParameterError("chain: noise prior parameters must be nonnegative");
    }
  }

  std::int64_t burn_in() const {
    return static_cast<std::int64_t>(std::floor(burn_in_fraction * static_cast<double>(n_iters)));
  }
};

struct SamplerCounters {
  std::uint64_t floor_events = 0;
};

namespace detail {

inline double draw_inverse_gamma_floored(double shape, double scale, RngStream& rng,
                                         SamplerCounters& counters) {
  if (!(scale >= kScaleFloor)) {
    scale = kScaleFloor;
    ++counters.floor_events;
  }
  double x = sample_inverse_gamma({shape, scale}, rng);
  if (!(x >= kScaleFloor)) {
    x = kScaleFloor;
    ++counters.floor_events;
  } else if (!(x <= kDrawCeiling)) {
    x = kDrawCeiling;
    ++counters.floor_events;
  }
  return x;
}

}  // namespace detail

// Draws theta_k from its full conditional and updates the residual.
// If tau2 lambda2_k < 1e-300 the draw is the zero vector.
inline void sample_theta_k(Eigen::Index k, ChainState& state, const RegressorSet& regs,
                           const ModulePrecomp& pc, RngStream& rng) {
  const double scale = state.tau2 * state.lambda2(k);
  const Eigen::Index m = regs.m();
  const auto& G = regs.G(k);
  Eigen::VectorXd theta_old = state.thetas.col(k);

  Eigen::VectorXd theta_new;
  double knorm = 0.0;
  if (!(scale >= kScaleFloor)) {
    theta_new = Eigen::VectorXd::Zero(m);
  } else {
    // G_k^T r_k with r_k = r + G_k theta_old
    Eigen::VectorXd b = G.transpose() * state.residual.r;
    b.noalias() += pc.gram * theta_old;
    const double ratio = state.sigma2 / scale;
    const double sigma = std::sqrt(state.sigma2);
    const Eigen::VectorXd c = pc.W.transpose() * b;
    Eigen::VectorXd z(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      const double d = pc.D(i) + ratio;
      z(i) = c(i) / d + sigma * rng.normal() / std::sqrt(d);
    }
    theta_new = pc.W * z;
    // M^{-1} theta = U z and U is orthogonal
    knorm = z.squaredNorm();
  }
  residual_swap_module(state.residual, G, theta_old, theta_new);
  state.thetas.col(k) = theta_new;
  state.knorm(k) = knorm;
}

// sigma2 | . ~ I_g(a0 + n/2, b0 + ||r||^2 / 2).
inline void sample_sigma2(ChainState& state, RngStream& rng, SamplerCounters& counters,
                          const NoisePrior& prior = {}) {
  const double rss = state.residual.r.squaredNorm();
  if (rss == 0.0 && prior.scale == 0.0) {
    throw NumericalError("sample_sigma2: residual is exactly zero (degenerate scale)");
  }
  const double n = static_cast<double>(state.residual.r.size());
  state.sigma2 = detail::draw_inverse_gamma_floored(prior.shape + 0.5 * n,
                                                    prior.scale + 0.5 * rss, rng, counters);
}

// lambda2_k | . ~ I_g((m+1)/2, 1/nu_k + ||theta_k||_K^2 / (2 tau2)).
inline void sample_lambda2_k(Eigen::Index k, ChainState& state, RngStream& rng,
                             SamplerCounters& counters) {
  const double m = static_cast<double>(state.thetas.rows());
  const double scale = 1.0 / state.nu(k) + state.knorm(k) / (2.0 * state.tau2);
  state.lambda2(k) =
      detail::draw_inverse_gamma_floored(0.5 * (m + 1.0), scale, rng, counters);
}

// Scale parameter of the tau2 conditional: 1/xi + sum_k ||theta_k||_K^2 / (2 lambda2_k).
inline double tau2_conditional_scale(const ChainState& state) {
  return 1.0 / state.xi + (state.knorm.array() / (2.0 * state.lambda2.array())).sum();
}

// tau2 | . ~ I_g((m p + 1)/2, tau2_conditional_scale).
inline void sample_tau2(ChainState& state, RngStream& rng, SamplerCounters& counters) {
  const double mp = static_cast<double>(state.thetas.size());
  state.tau2 = detail::draw_inverse_gamma_floored(0.5 * (mp + 1.0),
                                                  tau2_conditional_scale(state), rng,
                                                  counters);
}

// nu_k | . ~ I_g(1, 1 + 1/lambda2_k), xi | . ~ I_g(1, 1 + 1/tau2).
inline void sample_aux(ChainState& state, RngStream& rng, SamplerCounters& counters) {
  for (Eigen::Index k = 0; k < state.nu.size(); ++k) {
    state.nu(k) = detail::draw_inverse_gamma_floored(1.0, 1.0 + 1.0 / state.lambda2(k),
                                                     rng, counters);
  }
  state.xi = detail::draw_inverse_gamma_floored(1.0, 1.0 + 1.0 / state.tau2, rng, counters);
}

// Thinned draws of one chain plus running posterior means over every
// post-burn-in sweep.
struct EvidencePoint {
  std::int64_t sweep = 0;
  double log_ml = 0.0;
  double sigma2 = 0.0;
  double tau2 = 0.0;
  Eigen::VectorXd lambda2;
};

struct ChainRecord {
  double alpha = 0.0;
  ChainConfig config;
  std::vector<std::int64_t> sweeps;
  std::vector<double> sigma2;
  std::vector<double> tau2;
  std::vector<Eigen::VectorXd> lambda2;
  std::vector<Eigen::MatrixXd> theta_samples;  // only if store_theta_samples
  Eigen::MatrixXd theta_mean;                   // m x p
  double tau2_mean = 0.0;
  double sigma2_mean = 0.0;
  std::int64_t mean_count = 0;
  std::vector<EvidencePoint> evidence;
  std::uint64_t floor_events = 0;
  std::int64_t sweeps_run = 0;
  double seconds = 0.0;
  double precompute_seconds = 0.0;

  double seconds_per_sweep() const {
    return sweeps_run > 0 ? seconds / static_cast<double>(sweeps_run) : 0.0;
  }
};

// Holds the per-module precomputation for one (regressors, kernel) pair and
// performs systematic-scan sweeps:
//   theta_1..theta_p, sigma2, lambda2_1..lambda2_p, tau2, nu_1..nu_p, xi.
class GibbsSampler {
 public:
  GibbsSampler(const RegressorSet& regs, const StableSplineKernel& kernel)
      : regs_(regs), kernel_(kernel) {
    if (kernel.m() != regs.m()) {
      throw ShapeError("GibbsSampler: kernel size differs from FIR length m");
    }
    precomp_.resize(static_cast<std::size_t>(regs.p()));
    parallel_for(precomp_.size(), [&](std::size_t k) {
      precomp_[k] = precompute_module(regs.G(static_cast<Eigen::Index>(k)), kernel,
                                      static_cast<Eigen::Index>(k));
    });
  }

  const RegressorSet& regressors() const noexcept { return regs_; }
  const StableSplineKernel& kernel() const noexcept { return kernel_; }
  const ModulePrecomp& precomp(Eigen::Index k) const {
    return precomp_[static_cast<std::size_t>(k)];
  }

  ChainState initial_state(const Eigen::Ref<const Eigen::VectorXd>& Y,
                           double theta_init, double variance_init) const {
    const Eigen::Index m = regs_.m(), p = regs_.p();
    ChainState s;
    s.thetas = Eigen::MatrixXd::Constant(m, p, theta_init);
    s.knorm.resize(p);
    for (Eigen::Index k = 0; k < p; ++k) {
      s.knorm(k) = kernel_quadratic_norm(s.thetas.col(k), kernel_);
    }
    s.lambda2 = Eigen::VectorXd::Constant(p, variance_init);
    s.nu = Eigen::VectorXd::Constant(p, variance_init);
    s.tau2 = s.xi = s.sigma2 = variance_init;
    s.residual = compute_residual(Y, regs_, s.thetas);
    return s;
  }

  void sweep(ChainState& state, RngStream& rng, SamplerCounters& counters,
             const NoisePrior& prior = {}, bool freeze_hyperparameters = false) const {
    for (Eigen::Index k = 0; k < regs_.p(); ++k) {
      sample_theta_k(k, state, regs_, precomp(k), rng);
    }
    if (freeze_hyperparameters) return;
    sample_sigma2(state, rng, counters, prior);
    for (Eigen::Index k = 0; k < regs_.p(); ++k) sample_lambda2_k(k, state, rng, counters);
    sample_tau2(state, rng, counters);
    sample_aux(state, rng, counters);
  }

  ChainRecord run(const Eigen::Ref<const Eigen::VectorXd>& Y, const ChainConfig& config,
                  std::optional<ChainState> start = std::nullopt) const {
    config.validate();
    if (Y.size() != regs_.n()) throw ShapeError("run_chain: output length differs from n");
    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();

    RngStream rng(config.seed);
    SamplerCounters counters;
    ChainState state = start ? std::move(*start)
                             : initial_state(Y, config.theta_init_value, config.variance_init);
    std::optional<MarginalLikelihood> evidence;
    if (config.evidence_stride) evidence.emplace(regs_, kernel_, Y);

    ChainRecord rec;
    rec.alpha = kernel_.alpha();
    rec.config = config;
    rec.theta_mean = Eigen::MatrixXd::Zero(regs_.m(), regs_.p());
    const std::int64_t burn = config.burn_in();

    for (std::int64_t s = 0; s < config.n_iters; ++s) {
      try {
        sweep(state, rng, counters, config.noise_prior, config.freeze_hyperparameters);
        if ((s + 1) % config.residual_refresh == 0) {
          state.residual = compute_residual(Y, regs_, state.thetas);
        }
        if (s < burn) continue;
        rec.theta_mean += state.thetas;
        rec.tau2_mean += state.tau2;
        rec.sigma2_mean += state.sigma2;
        ++rec.mean_count;
        if ((s - burn) % config.thin == 0) {
          rec.sweeps.push_back(s);
          rec.sigma2.push_back(state.sigma2);
          rec.tau2.push_back(state.tau2);
          rec.lambda2.push_back(state.lambda2);
          if (config.store_theta_samples) rec.theta_samples.push_back(state.thetas);
        }
        if (evidence && (s + 1) % *config.evidence_stride == 0) {
          EvidencePoint pt;
          pt.sweep = s;
          pt.sigma2 = state.sigma2;
          pt.tau2 = state.tau2;
          pt.lambda2 = state.lambda2;
          pt.log_ml = evidence->log_evidence(state.sigma2, state.lambda2, state.tau2);
          rec.evidence.push_back(std::move(pt));
        }
      } catch (const Error& e) {
        std::ostringstream os;
        os << e.what() << " (sweep " << s << ")";
        throw NumericalError(os.str());
      }
    }
    if (rec.mean_count > 0) {
      const double inv = 1.0 / static_cast<double>(rec.mean_count);
      rec.theta_mean *= inv;
      rec.tau2_mean *= inv;
      rec.sigma2_mean *= inv;
    }
    rec.floor_events = counters.floor_events;
    rec.sweeps_run = config.n_iters;
    rec.seconds = std::chrono::duration<double>(clock::now() - t0).count();
    return rec;
  }

 private:
  const RegressorSet& regs_;
  const StableSplineKernel& kernel_;
  std::vector<ModulePrecomp> precomp_;
};

inline ChainRecord run_chain(const Eigen::Ref<const Eigen::VectorXd>& Y,
                             const RegressorSet& regs, const StableSplineKernel& kernel,
                             const ChainConfig& config) {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  GibbsSampler sampler(regs, kernel);
  const double pre = std::chrono::duration<double>(clock::now() - t0).count();
  ChainRecord rec = sampler.run(Y, config);
  rec.precompute_seconds = pre;
  return rec;
}

// Fit score 100 (1 - ||theta - estimate|| / ||theta||).
inline double fit_percent(const Eigen::Ref<const Eigen::VectorXd>& truth,
                          const Eigen::Ref<const Eigen::VectorXd>& estimate) {
  const double denom = truth.norm();
  if (denom == 0.0) throw ParameterError("fit_percent: true impulse response is zero");
  return 100.0 * (1.0 - (truth - estimate).norm() / denom);
}

struct PosteriorSummary {
  Eigen::MatrixXd means;                 // m x p
  std::optional<Eigen::MatrixXd> lower;  // pointwise 2.5% quantiles
  std::optional<Eigen::MatrixXd> upper;  // pointwise 97.5% quantiles
  Eigen::VectorXd norms;
  std::map<int, double> fits;        // 0-based module -> percent
  std::map<int, double> null_norms;  // 0-based module -> norm
  double tau2_mean = 0.0;
  double sigma2_mean = 0.0;
  double ess_tau2 = 0.0;
  double ess_sigma2 = 0.0;
};

inline PosteriorSummary summarize_posterior(
    const ChainRecord& rec, const std::optional<Eigen::MatrixXd>& truth = std::nullopt) {
  if (rec.mean_count == 0 || rec.sweeps.empty()) {
    throw StateError("summarize_posterior: chain has no post-burn-in samples");
  }
  PosteriorSummary out;
  out.means = rec.theta_mean;
  const Eigen::Index m = out.means.rows(), p = out.means.cols();
  out.norms = out.means.colwise().norm().transpose();
  out.tau2_mean = rec.tau2_mean;
  out.sigma2_mean = rec.sigma2_mean;
  out.ess_tau2 = effective_sample_size(rec.tau2);
  out.ess_sigma2 = effective_sample_size(rec.sigma2);

  if (!rec.theta_samples.empty()) {
    Eigen::MatrixXd lo(m, p), hi(m, p);
    std::vector<double> buf(rec.theta_samples.size());
    for (Eigen::Index k = 0; k < p; ++k) {
      for (Eigen::Index i = 0; i < m; ++i) {
        for (std::size_t s = 0; s < buf.size(); ++s) buf[s] = rec.theta_samples[s](i, k);
        lo(i, k) = quantile(buf, 0.025);
        hi(i, k) = quantile(buf, 0.975);
      }
    }
    out.lower = std::move(lo);
    out.upper = std::move(hi);
  }

  if (truth) {
    if (truth->rows() != m || truth->cols() != p) {
      throw ShapeError("summarize_posterior: truth shape differs from the chain");
    }
    for (Eigen::Index k = 0; k < p; ++k) {
      if (truth->col(k).norm() > 0.0) {
        out.fits[static_cast<int>(k)] = fit_percent(truth->col(k), out.means.col(k));
      } else {
        out.null_norms[static_cast<int>(k)] = out.norms(k);
      }
    }
  }
  return out;
}

}  // namespace sshnet

#endif  // SSHNET_GIBBS_HPP_
