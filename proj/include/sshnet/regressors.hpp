#ifndef SSHNET_REGRESSORS_HPP_
#define SSHNET_REGRESSORS_HPP_

#include <sstream>
#include <vector>

#include <Eigen/Dense>

#include "sshnet/errors.hpp"

namespace sshnet {

// n x m Toeplitz regressor: G(i, j) = u[(m - 1) + i - j] (0-based). The first
// m - 1 raw samples are warm-up so every row holds a full input history.
inline Eigen::MatrixXd build_toeplitz(const Eigen::Ref<const Eigen::VectorXd>& u,
                                      Eigen::Index n, Eigen::Index m) {
  if (n < 1 || m < 1) {
    throw ParameterError("build_toeplitz: n and m must be positive");
  }
  const Eigen::Index required = n + m - 1;
  if (u.size() < required) {
    std::ostringstream os;
    os << "build_toeplitz: input has " << u.size()
       << " samples but n + m - 1 = " << required << " are required";
    throw InsufficientHistoryError(os.str());
  }
  Eigen::MatrixXd G(n, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    G.col(j) = u.segment(m - 1 - j, n);
  }
  return G;
}

// One regressor matrix per module; all share n and m. Immutable once built.
class RegressorSet {
 public:
  RegressorSet() = default;

  RegressorSet(const std::vector<Eigen::VectorXd>& inputs, Eigen::Index n,
               Eigen::Index m)
      : n_(n), m_(m) {
    G_.reserve(inputs.size());
    for (const auto& u : inputs) G_.push_back(build_toeplitz(u, n, m));
  }

  explicit RegressorSet(std::vector<Eigen::MatrixXd> matrices)
      : G_(std::move(matrices)) {
    if (G_.empty()) throw ShapeError("RegressorSet: no regressor matrices");
    n_ = G_.front().rows();
    m_ = G_.front().cols();
    for (const auto& g : G_) {
      if (g.rows() != n_ || g.cols() != m_) {
        throw ShapeError("RegressorSet: regressor matrices differ in shape");
      }
    }
  }

  Eigen::Index n() const noexcept { return n_; }
  Eigen::Index m() const noexcept { return m_; }
  Eigen::Index p() const noexcept { return static_cast<Eigen::Index>(G_.size()); }
  const Eigen::MatrixXd& G(Eigen::Index k) const {
    return G_[static_cast<std::size_t>(k)];
  }

 private:
  std::vector<Eigen::MatrixXd> G_;
  Eigen::Index n_ = 0;
  Eigen::Index m_ = 0;
};

inline void check_thetas(const RegressorSet& regs, const Eigen::MatrixXd& thetas,
                         const char* who) {
  if (thetas.rows() != regs.m() || thetas.cols() != regs.p()) {
    std::ostringstream os;
    os << who << ": impulse responses are " << thetas.rows() << " x "
       << thetas.cols() << " but the regressors expect m x p = " << regs.m()
       << " x " << regs.p();
    throw ShapeError(os.str());
  }
}

// sum_k G_k theta_k; column k of `thetas` is theta_k.
inline Eigen::VectorXd predict(const RegressorSet& regs,
                               const Eigen::MatrixXd& thetas) {
  check_thetas(regs, thetas, "predict");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(regs.n());
  for (Eigen::Index k = 0; k < regs.p(); ++k) {
    out.noalias() += regs.G(k) * thetas.col(k);
  }
  return out;
}

// r = Y - sum_k G_k theta_k for the current chain state.
struct Residual {
  Eigen::VectorXd r;
};

inline Residual compute_residual(const Eigen::Ref<const Eigen::VectorXd>& Y,
                                 const RegressorSet& regs,
                                 const Eigen::MatrixXd& thetas) {
  if (Y.size() != regs.n()) {
    throw ShapeError("compute_residual: output length differs from n");
  }
  return Residual{Y - predict(regs, thetas)};
}

// r <- r + G_k (theta_old - theta_new), O(n m).
inline void residual_swap_module(Residual& res,
                                 const Eigen::Ref<const Eigen::MatrixXd>& G_k,
                                 const Eigen::Ref<const Eigen::VectorXd>& theta_old,
                                 const Eigen::Ref<const Eigen::VectorXd>& theta_new) {
  if (G_k.rows() != res.r.size() || G_k.cols() != theta_old.size() ||
      theta_old.size() != theta_new.size()) {
    throw ShapeError("residual_swap_module: dimension mismatch");
  }
  res.r.noalias() += G_k * (theta_old - theta_new);
}

}  // namespace sshnet

#endif  // SSHNET_REGRESSORS_HPP_
