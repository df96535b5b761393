#ifndef SSHNET_MARGINAL_LIKELIHOOD_HPP_
#define SSHNET_MARGINAL_LIKELIHOOD_HPP_

#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include <Eigen/Dense>

#include "sshnet/errors.hpp"
#include "sshnet/kernel.hpp"
#include "sshnet/regressors.hpp"

namespace sshnet {

// Which factorization evaluates log N(Y; 0, Sigma_Y).
//   kDirect:   Cholesky of the n x n output covariance.
//   kWoodbury: Cholesky of the (m p) x (m p) capacitance matrix.
//   kAuto:     kWoodbury when m p < n, otherwise kDirect.
enum class LikelihoodPath { kAuto, kDirect, kWoodbury };

// log density of the standard half-Cauchy at x = sqrt(x2).
inline double half_cauchy_log_density_of_square(double x2) {
  return std::log(2.0 / std::numbers::pi) - std::log1p(x2);
}

// Evaluates the output marginal
//   Y | sigma2, lambda2, tau2 ~ N(0, sum_k tau2 lambda2_k G_k K G_k^T + sigma2 I_n)
// and the optimized-evidence objective built on it. Caches B_k = G_k M and,
// when affordable, the n x n products B_k B_k^T or the Woodbury Gram blocks.
class MarginalLikelihood {
 public:
  // Upper bound on cached doubles for the n x n products (512 MB).
  static constexpr double kCacheBudget = 6.4e7;

  MarginalLikelihood(const RegressorSet& regs, const StableSplineKernel& kernel,
                     Eigen::VectorXd Y)
      : n_(regs.n()), m_(regs.m()), p_(regs.p()), Y_(std::move(Y)) {
    if (Y_.size() != n_) {
      throw ShapeError("MarginalLikelihood: output length differs from n");
    }
    if (kernel.m() != m_) {
      throw ShapeError("MarginalLikelihood: kernel size differs from m");
    }
    B_.reserve(static_cast<std::size_t>(p_));
    for (Eigen::Index k = 0; k < p_; ++k) {
      B_.push_back(regs.G(k) * kernel.factor().triangularView<Eigen::Lower>());
    }
    yy_ = Y_.squaredNorm();
  }

  Eigen::Index n() const noexcept { return n_; }

  LikelihoodPath resolve(LikelihoodPath path) const {
    if (path != LikelihoodPath::kAuto) return path;
    return m_ * p_ < n_ ? LikelihoodPath::kWoodbury : LikelihoodPath::kDirect;
  }

  // log N(Y; 0, Sigma_Y).
  double gaussian_part(double sigma2, const Eigen::Ref<const Eigen::VectorXd>& lambda2,
                       double tau2, LikelihoodPath path = LikelihoodPath::kAuto) {
    if (lambda2.size() != p_) {
      throw ShapeError("marginal likelihood: lambda2 must have p entries");
    }
    if (!(sigma2 > 0.0) || !(tau2 > 0.0) || !(lambda2.array() > 0.0).all()) {
      throw ParameterError("marginal likelihood: variances must be positive");
    }
    return resolve(path) == LikelihoodPath::kWoodbury
               ? gaussian_woodbury(sigma2, lambda2, tau2)
               : gaussian_direct(sigma2, lambda2, tau2);
  }

  // log of  p(Y | sigma2, lambda, tau) sigma^{-2} p(tau) prod_k p(lambda_k)
  // with half-Cauchy p(.).
  double log_evidence(double sigma2, const Eigen::Ref<const Eigen::VectorXd>& lambda2,
                      double tau2, LikelihoodPath path = LikelihoodPath::kAuto) {
    double v = gaussian_part(sigma2, lambda2, tau2, path);
    v -= std::log(sigma2);
    v += half_cauchy_log_density_of_square(tau2);
    for (Eigen::Index k = 0; k < p_; ++k) {
      v += half_cauchy_log_density_of_square(lambda2(k));
    }
    return v;
  }

 private:
  static constexpr double kLog2Pi = 1.8378770664093454835606594728112;

  [[noreturn]] static void fail_factor(const Eigen::MatrixXd& A, const char* what) {
    Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
    std::ostringstream os;
    os << "marginal likelihood: " << what
       << " is not positive definite (smallest pivot "
       << ldlt.vectorD().minCoeff() << ")";
    throw ConditioningError(os.str());
  }

  double gaussian_direct(double sigma2, const Eigen::Ref<const Eigen::VectorXd>& lambda2,
                         double tau2) {
    const bool use_cache =
        static_cast<double>(p_) * static_cast<double>(n_) * static_cast<double>(n_) <=
        kCacheBudget;
    if (use_cache && P_.empty()) {
      P_.reserve(B_.size());
      for (const auto& b : B_) {
        Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n_, n_);
        P.selfadjointView<Eigen::Lower>().rankUpdate(b);
        P_.push_back(std::move(P));
      }
    }
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(n_, n_);
    S.diagonal().setConstant(sigma2);
    for (Eigen::Index k = 0; k < p_; ++k) {
      const double c = tau2 * lambda2(k);
      if (use_cache) {
        S.triangularView<Eigen::Lower>() += c * P_[static_cast<std::size_t>(k)];
      } else {
        S.selfadjointView<Eigen::Lower>().rankUpdate(B_[static_cast<std::size_t>(k)], c);
      }
    }
    Eigen::LLT<Eigen::MatrixXd> llt(S);
    if (llt.info() != Eigen::Success) {
      fail_factor(S.selfadjointView<Eigen::Lower>(), "output covariance");
    }
    const Eigen::MatrixXd& L = llt.matrixLLT();
    const double logdet = 2.0 * L.diagonal().array().log().sum();
    Eigen::VectorXd w = Y_;
    llt.matrixL().solveInPlace(w);
    return -0.5 * (static_cast<double>(n_) * kLog2Pi + logdet + w.squaredNorm());
  }

  double gaussian_woodbury(double sigma2,
                           const Eigen::Ref<const Eigen::VectorXd>& lambda2,
                           double tau2) {
    const Eigen::Index mp = m_ * p_;
    if (BtB_.size() == 0) {
      Eigen::MatrixXd B(n_, mp);
      for (Eigen::Index k = 0; k < p_; ++k) {
        B.middleCols(k * m_, m_) = B_[static_cast<std::size_t>(k)];
      }
      BtB_ = B.transpose() * B;
      BtY_ = B.transpose() * Y_;
    }
    Eigen::VectorXd scale(mp);
    for (Eigen::Index k = 0; k < p_; ++k) {
      scale.segment(k * m_, m_).setConstant(std::sqrt(tau2 * lambda2(k)));
    }
    // I + D^{1/2} B^T B D^{1/2} / sigma2
    Eigen::MatrixXd inner = (scale.asDiagonal() * BtB_ * scale.asDiagonal()) / sigma2;
    inner.diagonal().array() += 1.0;
    Eigen::LLT<Eigen::MatrixXd> llt(inner);
    if (llt.info() != Eigen::Success) fail_factor(inner, "capacitance matrix");
    const double logdet_inner = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
    const double logdet = static_cast<double>(n_) * std::log(sigma2) + logdet_inner;
    Eigen::VectorXd v = scale.asDiagonal() * BtY_;
    llt.matrixL().solveInPlace(v);
    const double quad = (yy_ - v.squaredNorm() / sigma2) / sigma2;
    return -0.5 * (static_cast<double>(n_) * kLog2Pi + logdet + quad);
  }

  Eigen::Index n_, m_, p_;
  Eigen::VectorXd Y_;
  double yy_ = 0.0;
  std::vector<Eigen::MatrixXd> B_;
  std::vector<Eigen::MatrixXd> P_;
  Eigen::MatrixXd BtB_;
  Eigen::VectorXd BtY_;
};

// One-shot evaluation of the optimized-evidence objective.
inline double log_marginal_likelihood(const Eigen::Ref<const Eigen::VectorXd>& Y,
                                      const RegressorSet& regs,
                                      const StableSplineKernel& kernel, double sigma2,
                                      const Eigen::Ref<const Eigen::VectorXd>& lambda2,
                                      double tau2,
                                      LikelihoodPath path = LikelihoodPath::kAuto) {
  MarginalLikelihood ml(regs, kernel, Y);
  return ml.log_evidence(sigma2, lambda2, tau2, path);
}

}  // namespace sshnet

#endif  // SSHNET_MARGINAL_LIKELIHOOD_HPP_
