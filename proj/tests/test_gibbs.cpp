#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>
#include <gtest/gtest.h>

#include "sshnet/diagnostics.hpp"
#include "sshnet/gibbs.hpp"
#include "sshnet/netsim.hpp"
#include "test_support.hpp"

namespace sshnet {
namespace {

using testing::dense_kernel;
using testing::ks_statistic;
using testing::max_rel_error;
using testing::random_matrix;
using testing::random_vector;

// Dense posterior of theta_k given the partial residual y_k = Y - sum_{j != k} G_j theta_j.
struct DensePosterior {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

DensePosterior dense_posterior(const Eigen::MatrixXd& G, const Eigen::MatrixXd& K, double sigma2,
                               double s, const Eigen::VectorXd& yk) {
  const Eigen::MatrixXd prec = G.transpose() * G / sigma2 + K.inverse() / s;
  DensePosterior out;
  out.cov = prec.inverse();
  out.cov = 0.5 * (out.cov + out.cov.transpose()).eval();
  out.mean = out.cov * G.transpose() * yk / sigma2;
  return out;
}

ChainState scalar_state(double y, double sigma2, double tau2, double lambda2) {
  ChainState s;
  s.thetas = Eigen::MatrixXd::Zero(1, 1);
  s.knorm = Eigen::VectorXd::Zero(1);
  s.lambda2 = Eigen::VectorXd::Constant(1, lambda2);
  s.nu = Eigen::VectorXd::Ones(1);
  s.tau2 = tau2;
  s.sigma2 = sigma2;
  s.residual.r = Eigen::VectorXd::Constant(1, y);
  return s;
}

double ig_cdf(double a, double b, double x) { return boost::math::gamma_q(a, b / x); }

TEST(Precompute, Examples) {
  const auto k1 = build_kernel(1, 0.5);
  const ModulePrecomp zero = precompute_module(Eigen::MatrixXd::Zero(4, 1), k1);
  EXPECT_EQ(zero.D(0), 0.0);

  const ModulePrecomp scalar = precompute_module(Eigen::MatrixXd::Constant(1, 1, 3.0), k1);
  EXPECT_NEAR(scalar.D(0), 9.0, 1e-14);
  EXPECT_NEAR(std::abs(scalar.U(0, 0)), 1.0, 1e-15);

  RngStream rng(1);
  const Eigen::MatrixXd G = random_matrix(20, 5, rng);
  const auto k = build_kernel(5, 0.7);
  const ModulePrecomp pc = precompute_module(G, k);
  const Eigen::MatrixXd M = k.factor();
  const Eigen::MatrixXd target = M.transpose() * G.transpose() * G * M;
  const Eigen::MatrixXd recon = pc.U * pc.D.asDiagonal() * pc.U.transpose();
  EXPECT_LT((recon - target).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT((pc.W - M * pc.U).cwiseAbs().maxCoeff(), 1e-14);

  EXPECT_THROW(precompute_module(Eigen::MatrixXd::Zero(4, 3), k1, 6), ShapeError);
}

TEST(ThetaConditional, ScalarProbe) {
  const ModulePrecomp pc = precompute_module(Eigen::MatrixXd::Ones(1, 1), build_kernel(1, 0.5));
  const double y = 1.7;
  const ThetaConditional c = theta_conditional(pc, 1.0, 1.0, Eigen::VectorXd::Constant(1, y));
  EXPECT_NEAR(c.mean(0), y / 2, 1e-15);
  EXPECT_NEAR(c.factor(0, 0) * c.factor(0, 0), 0.5, 1e-15);

  const ThetaConditional tiny =
      theta_conditional(pc, 1.0, 1e-12, Eigen::VectorXd::Constant(1, 1.0));
  EXPECT_NEAR(tiny.mean(0), 1e-12, 1e-20);

  // sampled moments
  const RegressorSet regs({Eigen::MatrixXd::Ones(1, 1)});
  ChainState state = scalar_state(y, 1.0, 1.0, 1.0);
  RngStream rng(2);
  const int n = 100000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    sample_theta_k(0, state, regs, pc, rng);
    const double t = state.thetas(0, 0);
    sum += t;
    sum2 += t * t;
    ASSERT_NEAR(state.residual.r(0), y - t, 1e-12);
  }
  const double mean = sum / n;
  EXPECT_NEAR(mean, y / 2, 0.01);
  EXPECT_NEAR(sum2 / n - mean * mean, 0.5, 0.01);
}

TEST(ThetaConditional, UnderflowGivesZero) {
  const auto k = build_kernel(3, 0.8);
  RngStream rng(3);
  const RegressorSet regs({random_matrix(6, 3, rng)});
  const ModulePrecomp pc = precompute_module(regs.G(0), k);
  ChainState state;
  state.thetas = Eigen::MatrixXd::Constant(3, 1, 0.5);
  state.knorm = Eigen::VectorXd::Constant(1, 1.0);
  state.lambda2 = Eigen::VectorXd::Constant(1, 1e-200);
  state.nu = Eigen::VectorXd::Ones(1);
  state.tau2 = 1e-200;
  const Eigen::VectorXd Y = random_vector(6, rng);
  state.residual = compute_residual(Y, regs, state.thetas);
  sample_theta_k(0, state, regs, pc, rng);
  EXPECT_EQ(state.thetas.col(0), Eigen::VectorXd::Zero(3));
  EXPECT_EQ(state.knorm(0), 0.0);
  EXPECT_LT((state.residual.r - Y).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(ThetaConditional, FactorIdentityAcrossRatios) {
  RngStream rng(4);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index m = 1 + static_cast<Eigen::Index>(rng.uniform() * 6);
    const Eigen::Index n = m + static_cast<Eigen::Index>(rng.uniform() * (21 - m));
    const double alpha = 0.3 + 0.65 * rng.uniform();
    const double ratio = std::pow(10.0, -6.0 + 12.0 * rng.uniform());
    const double sigma2 = std::exp(rng.normal());
    const double s = sigma2 / ratio;
    const Eigen::MatrixXd G = random_matrix(n, m, rng);
    const auto k = build_kernel(m, alpha);
    const ModulePrecomp pc = precompute_module(G, k);
    const ThetaConditional c = theta_conditional(pc, sigma2, s, Eigen::VectorXd::Zero(m));
    const Eigen::MatrixXd sigma_hat =
        dense_posterior(G, dense_kernel(m, alpha), sigma2, s, Eigen::VectorXd::Zero(n)).cov;
    worst = std::max(worst, max_rel_error(c.factor * c.factor.transpose(), sigma_hat));
  }
  EXPECT_LT(worst, 1e-8);
}

TEST(ThetaConditional, FactorChoiceDoesNotMatter) {
  RngStream rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index m = 2 + static_cast<Eigen::Index>(rng.uniform() * 5);
    const double alpha = 0.3 + 0.65 * rng.uniform();
    const double sigma2 = 0.5 + rng.uniform(), s = 0.1 + rng.uniform();
    const Eigen::MatrixXd G = random_matrix(15, m, rng);
    const Eigen::VectorXd b = random_vector(m, rng);
    const auto k = build_kernel(m, alpha);

    // symmetric square root of K
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ek(dense_kernel(m, alpha));
    const Eigen::MatrixXd S =
        ek.eigenvectors() * ek.eigenvalues().cwiseSqrt().asDiagonal() * ek.eigenvectors().transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eg(S * G.transpose() * G * S);
    const Eigen::ArrayXd d = eg.eigenvalues().array().max(0.0) + sigma2 / s;
    const Eigen::MatrixXd Wsym = S * eg.eigenvectors();
    const Eigen::MatrixXd A_sym = std::sqrt(sigma2) * Wsym * d.rsqrt().matrix().asDiagonal();
    const Eigen::VectorXd mean_sym = Wsym * ((Wsym.transpose() * b).array() / d).matrix();

    const ThetaConditional c = theta_conditional(precompute_module(G, k), sigma2, s, b);
    EXPECT_LT(max_rel_error(c.factor * c.factor.transpose(), A_sym * A_sym.transpose()), 1e-8);
    EXPECT_LT(max_rel_error(c.mean, mean_sym), 1e-8);
  }
}

TEST(ThetaConditional, SampledMomentsMatchDenseOracle) {
  RngStream rng(6);
  const Eigen::Index n = 15, m = 4;
  const double alpha = 0.8, sigma2 = 0.3, tau2 = 1.5, lambda2 = 0.7;
  std::vector<Eigen::MatrixXd> gs{random_matrix(n, m, rng), random_matrix(n, m, rng)};
  const RegressorSet regs(gs);
  const auto k = build_kernel(m, alpha);
  const ModulePrecomp pc = precompute_module(regs.G(0), k);
  const Eigen::VectorXd Y = random_vector(n, rng) * 2.0;

  ChainState state;
  state.thetas = random_matrix(m, 2, rng);
  state.knorm = Eigen::VectorXd::Zero(2);
  state.lambda2 = Eigen::VectorXd::Constant(2, lambda2);
  state.nu = Eigen::VectorXd::Ones(2);
  state.tau2 = tau2;
  state.sigma2 = sigma2;
  state.residual = compute_residual(Y, regs, state.thetas);

  const Eigen::VectorXd yk = Y - regs.G(1) * state.thetas.col(1);
  const DensePosterior oracle = dense_posterior(regs.G(0), dense_kernel(m, alpha), sigma2,
                                                tau2 * lambda2, yk);
  const int draws = 100000;
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(m);
  Eigen::MatrixXd sum2 = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < draws; ++i) {
    sample_theta_k(0, state, regs, pc, rng);
    sum += state.thetas.col(0);
    sum2 += state.thetas.col(0) * state.thetas.col(0).transpose();
  }
  const Eigen::VectorXd mean = sum / draws;
  const Eigen::MatrixXd cov = sum2 / draws - mean * mean.transpose();
  EXPECT_LT((mean - oracle.mean).norm() / oracle.mean.norm(), 0.02);
  EXPECT_LT(max_rel_error(cov, oracle.cov), 0.02);
  EXPECT_NEAR(state.knorm(0), kernel_quadratic_norm(state.thetas.col(0), k), 1e-10);
}

TEST(Sigma2, ConditionalMeanAndScaling) {
  RngStream rng(7);
  SamplerCounters counters;
  ChainState state;
  state.residual.r = Eigen::VectorXd::Constant(1000, std::sqrt(2.0));  // ||r||^2 = 2000
  const int n = 100000;
  std::vector<double> base(n), scaled(n);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    sample_sigma2(state, rng, counters);
    base[i] = state.sigma2;
    sum += state.sigma2;
  }
  EXPECT_NEAR(sum / n, 2000.0 / (2.0 * 499.0), 0.005 * 2.004);
  state.residual.r *= 3.0;
  for (int i = 0; i < n; ++i) {
    sample_sigma2(state, rng, counters);
    scaled[i] = state.sigma2;
  }
  for (double q : {0.1, 0.5, 0.9}) {
    EXPECT_NEAR(quantile(scaled, q) / quantile(base, q), 9.0, 0.09);
  }

  // r = (1, 1): I_g(1, 1)
  state.residual.r = Eigen::Vector2d(1, 1);
  std::vector<double> x(100000);
  for (auto& v : x) {
    sample_sigma2(state, rng, counters);
    v = state.sigma2;
  }
  EXPECT_LT(ks_statistic(x, [](double t) { return ig_cdf(1.0, 1.0, t); }), 0.01);

  state.residual.r = Eigen::VectorXd::Zero(3);
  EXPECT_THROW(sample_sigma2(state, rng, counters), NumericalError);
  EXPECT_NO_THROW(sample_sigma2(state, rng, counters, NoisePrior{2.0, 1.0}));
}

TEST(Lambda2, ConditionalParameters) {
  RngStream rng(8);
  SamplerCounters counters;
  ChainState state;
  state.thetas = Eigen::MatrixXd::Zero(3, 1);
  state.knorm = Eigen::VectorXd::Constant(1, 2.0);
  state.nu = Eigen::VectorXd::Ones(1);
  state.lambda2 = Eigen::VectorXd::Ones(1);
  state.tau2 = 1.0;
  std::vector<double> x(100000);
  for (auto& v : x) {
    sample_lambda2_k(0, state, rng, counters);
    v = state.lambda2(0);
  }
  EXPECT_LT(ks_statistic(x, [](double t) { return ig_cdf(2.0, 2.0, t); }), 0.01);

  state.knorm(0) = 0.0;
  state.nu(0) = 0.5;
  for (auto& v : x) {
    sample_lambda2_k(0, state, rng, counters);
    v = state.lambda2(0);
  }
  EXPECT_LT(ks_statistic(x, [](double t) { return ig_cdf(2.0, 2.0, t); }), 0.01);
}

TEST(Tau2, ConditionalParameters) {
  RngStream rng(9);
  SamplerCounters counters;
  ChainState state;
  state.thetas = Eigen::MatrixXd::Zero(2, 3);
  state.lambda2 = Eigen::Vector3d(1.0, 2.0, 0.5);
  state.knorm = Eigen::Vector3d(2.0, 4.0, 2.0);  // 1 + 1 + 2 = 4
  state.xi = 1.0;
  EXPECT_DOUBLE_EQ(tau2_conditional_scale(state), 5.0);
  std::vector<double> x(100000);
  for (auto& v : x) {
    sample_tau2(state, rng, counters);
    v = state.tau2;
  }
  EXPECT_LT(ks_statistic(x, [](double t) { return ig_cdf(3.5, 5.0, t); }), 0.01);

  const double sum_term = tau2_conditional_scale(state) - 1.0 / state.xi;
  state.lambda2 *= 2.0;
  EXPECT_EQ(tau2_conditional_scale(state) - 1.0 / state.xi, sum_term / 2.0);

  state.knorm.setZero();
  state.xi = 0.25;
  EXPECT_DOUBLE_EQ(tau2_conditional_scale(state), 4.0);
}

TEST(Aux, ConditionalParameters) {
  RngStream rng(10);
  SamplerCounters counters;
  ChainState state;
  state.lambda2 = Eigen::VectorXd::Ones(1);
  state.nu = Eigen::VectorXd::Ones(1);
  state.tau2 = 1e12;
  std::vector<double> nu(100000), xi(100000);
  for (std::size_t i = 0; i < nu.size(); ++i) {
    sample_aux(state, rng, counters);
    ASSERT_GT(state.nu(0), 0.0);
    ASSERT_GT(state.xi, 0.0);
    nu[i] = state.nu(0);
    xi[i] = state.xi;
  }
  EXPECT_LT(ks_statistic(nu, [](double t) { return ig_cdf(1.0, 2.0, t); }), 0.01);
  EXPECT_LT(ks_statistic(xi, [](double t) { return ig_cdf(1.0, 1.0, t); }), 0.01);
}

TEST(Floors, CountedAndClamped) {
  RngStream rng(11);
  SamplerCounters counters;
  const double x = detail::draw_inverse_gamma_floored(1.0, 0.0, rng, counters);
  EXPECT_GE(x, kScaleFloor);
  EXPECT_GE(counters.floor_events, 1u);
}

// Model: Y ~ N(g theta, sigma2 I), theta | lambda2 ~ N(0, tau2 lambda2), lambda ~ C+(0, 1),
// sigma2 and tau2 fixed. The posterior of lambda2 is proportional to
// N(Y; 0, sigma2 I + tau2 lambda2 g g^T) p(lambda2), evaluated on a log grid.
TEST(Lambda2, StationaryMarginalMatchesQuadrature) {
  Eigen::VectorXd g(3), Y(3);
  g << 1.0, -0.5, 0.8;
  Y << 0.9, -0.2, 1.1;
  const double sigma2 = 0.5, tau2 = 1.0;
  const double gg = g.squaredNorm(), gy = g.dot(Y), yy = Y.squaredNorm();

  auto log_post_u = [&](double u) {  // density of u = log lambda2
    const double s = std::exp(u);
    const double c = tau2 * s;
    // |sigma2 I + c g g^T| and its inverse by the rank-one formulas
    const double logdet = 3.0 * std::log(sigma2) + std::log1p(c * gg / sigma2);
    const double quad = yy / sigma2 - c * gy * gy / (sigma2 * (sigma2 + c * gg));
    const double prior = 0.5 * u - std::log1p(s);  // s p(s), p(s) ∝ s^{-1/2} / (1 + s)
    return -0.5 * (logdet + quad) + prior;
  };
  const double lo = -80.0, hi = 60.0;
  const int N = 280001;
  const double h = (hi - lo) / (N - 1);
  std::vector<double> grid(N), cdf(N, 0.0);
  double mx = -INFINITY;
  for (int i = 0; i < N; ++i) mx = std::max(mx, log_post_u(lo + i * h));
  for (int i = 0; i < N; ++i) grid[i] = std::exp(log_post_u(lo + i * h) - mx);
  for (int i = 1; i < N; ++i) cdf[i] = cdf[i - 1] + 0.5 * h * (grid[i] + grid[i - 1]);
  const double total = cdf.back();
  auto oracle = [&](double lambda2) {
    const double u = std::log(lambda2);
    if (u <= lo) return 0.0;
    if (u >= hi) return 1.0;
    const double pos = (u - lo) / h;
    const auto i = static_cast<std::size_t>(pos);
    const double f = pos - static_cast<double>(i);
    return ((1.0 - f) * cdf[i] + f * cdf[std::min<std::size_t>(i + 1, N - 1)]) / total;
  };

  const RegressorSet regs({Eigen::MatrixXd(g)});
  const auto kernel = build_kernel(1, 0.9);
  const ModulePrecomp pc = precompute_module(regs.G(0), kernel);
  ChainState state;
  state.thetas = Eigen::MatrixXd::Constant(1, 1, 1e-4);
  state.knorm = Eigen::VectorXd::Constant(1, 1e-8);
  state.lambda2 = Eigen::VectorXd::Ones(1);
  state.nu = Eigen::VectorXd::Ones(1);
  state.tau2 = tau2;
  state.sigma2 = sigma2;
  state.residual = compute_residual(Y, regs, state.thetas);
  RngStream rng(12);
  SamplerCounters counters;
  std::vector<double> draws;
  const int thin = 20;
  for (int s = 0; s < 1000 + 100000 * thin; ++s) {
    sample_theta_k(0, state, regs, pc, rng);
    sample_lambda2_k(0, state, rng, counters);
    state.nu(0) = detail::draw_inverse_gamma_floored(1.0, 1.0 + 1.0 / state.lambda2(0), rng,
                                                     counters);
    if (s >= 1000 && (s - 1000) % thin == 0) draws.push_back(state.lambda2(0));
  }
  EXPECT_LT(ks_statistic(draws, oracle), 0.02);
}

class SmallChain : public ::testing::Test {
 protected:
  void SetUp() override {
    RngStream rng(13);
    ds = synthesize_dataset(4, 2, 60, 20, 10.0, InputKind::kWhite, rng);
    regs = ds.regressors();
  }
  NetworkDataset ds;
  RegressorSet regs;
};

TEST_F(SmallChain, Reproducible) {
  const auto k = build_kernel(20, 0.85);
  ChainConfig cfg;
  cfg.n_iters = 600;
  cfg.seed = 4;
  cfg.evidence_stride = 50;
  const ChainRecord a = run_chain(ds.outputs, regs, k, cfg);
  const ChainRecord b = run_chain(ds.outputs, regs, k, cfg);
  EXPECT_EQ(a.sigma2, b.sigma2);
  EXPECT_EQ(a.tau2, b.tau2);
  EXPECT_EQ(a.theta_mean, b.theta_mean);
  ASSERT_EQ(a.evidence.size(), b.evidence.size());
  for (std::size_t i = 0; i < a.evidence.size(); ++i) {
    EXPECT_EQ(a.evidence[i].log_ml, b.evidence[i].log_ml);
  }
  EXPECT_EQ(a.sweeps.front(), cfg.burn_in());
  EXPECT_EQ(a.sweeps.size(), 45u);
  EXPECT_EQ(a.mean_count, 450);
  // evidence only after burn-in, at sweeps 199, 249, ...
  EXPECT_EQ(a.evidence.front().sweep, 199);
  for (std::size_t i = 1; i < a.evidence.size(); ++i) {
    EXPECT_GT(a.evidence[i].sweep, a.evidence[i - 1].sweep);
  }
}

TEST_F(SmallChain, PositivityAndResidualConsistency) {
  const auto k = build_kernel(20, 0.9);
  GibbsSampler sampler(regs, k);
  ChainState state = sampler.initial_state(ds.outputs, 1e-4, 1.0);
  RngStream rng(14);
  SamplerCounters counters;
  for (int s = 0; s < 100000; ++s) {
    sampler.sweep(state, rng, counters);
    ASSERT_GT(state.sigma2, 0.0);
    ASSERT_GT(state.tau2, 0.0);
    ASSERT_GT(state.xi, 0.0);
    ASSERT_GT(state.lambda2.minCoeff(), 0.0);
    ASSERT_GT(state.nu.minCoeff(), 0.0);
    if (s % 97 == 0) {
      const Eigen::VectorXd r = compute_residual(ds.outputs, regs, state.thetas).r;
      ASSERT_LT((r - state.residual.r).cwiseAbs().maxCoeff(),
                1e-8 * (1.0 + ds.outputs.cwiseAbs().maxCoeff()));
      for (Eigen::Index j = 0; j < regs.p(); ++j) {
        const double kn = kernel_quadratic_norm(state.thetas.col(j), k);
        ASSERT_NEAR(state.knorm(j), kn, 1e-8 * (1.0 + kn));
      }
    }
  }
}

TEST_F(SmallChain, FrozenHyperparametersGiveClosedFormMean) {
  RngStream rng(15);
  const RegressorSet one({random_matrix(20, 4, rng)});
  const Eigen::VectorXd Y = one.G(0) * Eigen::Vector4d(1.0, 0.6, 0.3, 0.1) + 0.3 * random_vector(20, rng);
  const auto k = build_kernel(4, 0.7);
  ChainConfig cfg;
  cfg.n_iters = 100000;
  cfg.burn_in_fraction = 0.0;
  cfg.freeze_hyperparameters = true;
  cfg.seed = 3;
  const ChainRecord rec = run_chain(Y, one, k, cfg);
  const Eigen::MatrixXd G = one.G(0);
  const double sigma2 = 1.0, s = 1.0;
  const Eigen::VectorXd closed =
      (G.transpose() * G / sigma2 + dense_kernel(4, 0.7).inverse() / s)
          .ldlt()
          .solve(G.transpose() * Y / sigma2);
  EXPECT_LT((rec.theta_mean.col(0) - closed).norm() / closed.norm(), 0.01);
}

TEST_F(SmallChain, SummaryAndFits) {
  Eigen::VectorXd theta(3);
  theta << 1.0, -0.5, 0.25;
  EXPECT_DOUBLE_EQ(fit_percent(theta, theta), 100.0);
  EXPECT_DOUBLE_EQ(fit_percent(theta, Eigen::VectorXd::Zero(3)), 0.0);
  EXPECT_DOUBLE_EQ(fit_percent(theta, 2.0 * theta), 0.0);
  EXPECT_THROW(fit_percent(Eigen::VectorXd::Zero(3), theta), ParameterError);

  ChainRecord empty;
  EXPECT_THROW(summarize_posterior(empty), StateError);

  const auto k = build_kernel(20, 0.9);
  ChainConfig cfg;
  cfg.n_iters = 400;
  cfg.store_theta_samples = true;
  const ChainRecord rec = run_chain(ds.outputs, regs, k, cfg);
  const PosteriorSummary sum = summarize_posterior(rec, ds.truth);
  EXPECT_EQ(sum.fits.size(), 2u);
  EXPECT_EQ(sum.null_norms.size(), 2u);
  ASSERT_TRUE(sum.lower && sum.upper);
  EXPECT_TRUE((sum.lower->array() <= sum.upper->array()).all());
  for (int kk : *ds.active_set) EXPECT_TRUE(sum.fits.count(kk));
}

TEST(Chain, EmptyNetworkShrinksGlobalScale) {
  auto run = [](Eigen::Index q) {
    RngStream rng(21);
    const NetworkDataset ds = synthesize_dataset(10, q, 200, 20, 10.0, InputKind::kWhite, rng);
    ChainConfig cfg;
    cfg.n_iters = 4000;
    cfg.seed = 21;
    return run_chain(ds.outputs, ds.regressors(), build_kernel(20, 0.9), cfg);
  };
  const ChainRecord empty = run(0), full = run(3);
  EXPECT_LT(empty.tau2_mean, full.tau2_mean);
}

TEST(Chain, ConfigValidation) {
  ChainConfig cfg;
  cfg.thin = 0;
  EXPECT_THROW(cfg.validate(), ParameterError);
  cfg = {};
  cfg.burn_in_fraction = 1.0;
  EXPECT_THROW(cfg.validate(), ParameterError);
  cfg = {};
  cfg.n_iters = 0;
  EXPECT_THROW(cfg.validate(), ParameterError);
  cfg = {};
  cfg.evidence_stride = 0;
  EXPECT_THROW(cfg.validate(), ParameterError);
}

}  // namespace
}  // namespace sshnet
