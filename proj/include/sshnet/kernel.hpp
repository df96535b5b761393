#ifndef SSHNET_KERNEL_HPP_
#define SSHNET_KERNEL_HPP_

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "sshnet/errors.hpp"

namespace sshnet {

constexpr double kMinAlpha = 1e-6;
constexpr double kMaxAlpha = 0.999;

// First-order stable spline kernel K_ij = alpha^max(i, j) (0-based), cached
// together with its lower Cholesky factor M (K = M M^T) and its inverse.
// Immutable after construction.
class StableSplineKernel {
 public:
  StableSplineKernel(Eigen::Index m, double alpha) : m_(m), alpha_(alpha) {
    if (m < 1) {
      throw ParameterError("stable spline kernel: FIR length m must be >= 1");
    }
    if (!(alpha >= kMinAlpha)) {
      std::ostringstream os;
      os << "stable spline kernel: alpha = " << alpha
         << " is below the lower bound " << kMinAlpha;
      throw ParameterError(os.str());
    }
    if (!(alpha <= kMaxAlpha)) {
      std::ostringstream os;
      os << "stable spline kernel: alpha = " << alpha
         << " exceeds the upper bound " << kMaxAlpha;
      throw ParameterError(os.str());
    }

    // powers by repeated multiplication so entries are exact products
    Eigen::VectorXd powers(m);
    powers(0) = 1.0;
    for (Eigen::Index i = 1; i < m; ++i) powers(i) = powers(i - 1) * alpha;

    K_.resize(m, m);
    for (Eigen::Index j = 0; j < m; ++j) {
      for (Eigen::Index i = 0; i < m; ++i) K_(i, j) = powers(std::max(i, j));
    }

    Eigen::LLT<Eigen::MatrixXd> llt(K_);
    if (llt.info() != Eigen::Success) {
      std::ostringstream os;
      os << "stable spline kernel is numerically indefinite (alpha = " << alpha
         << ", m = " << m << ")";
      throw ConditioningError(os.str());
    }
    M_ = llt.matrixL();
    if (!(M_.diagonal().array() > 0.0).all() || !M_.allFinite()) {
      std::ostringstream os;
      os << "stable spline kernel factor has a nonpositive pivot (alpha = "
         << alpha << ", m = " << m << ")";
      throw ConditioningError(os.str());
    }

    Eigen::MatrixXd Minv = Eigen::MatrixXd::Identity(m, m);
    M_.triangularView<Eigen::Lower>().solveInPlace(Minv);
    K_inv_ = Minv.transpose() * Minv;
  }

  Eigen::Index m() const noexcept { return m_; }
  double alpha() const noexcept { return alpha_; }
  const Eigen::MatrixXd& K() const noexcept { return K_; }
  // Lower-triangular factor with K = M M^T.
  const Eigen::MatrixXd& factor() const noexcept { return M_; }
  const Eigen::MatrixXd& K_inv() const noexcept { return K_inv_; }

  // Solves M x = v in place.
  template <typename Derived>
  void whiten_in_place(Eigen::MatrixBase<Derived>& v) const {
    M_.triangularView<Eigen::Lower>().solveInPlace(v);
  }

 private:
  Eigen::Index m_;
  double alpha_;
  Eigen::MatrixXd K_;
  Eigen::MatrixXd M_;
  Eigen::MatrixXd K_inv_;
};

inline StableSplineKernel build_kernel(Eigen::Index m, double alpha) {
  return StableSplineKernel(m, alpha);
}

// ||v||_K^2 = v^T K^{-1} v, evaluated as ||M^{-1} v||^2.
inline double kernel_quadratic_norm(const Eigen::Ref<const Eigen::VectorXd>& v,
                                    const StableSplineKernel& kernel) {
  if (v.size() != kernel.m()) {
    std::ostringstream os;
    os << "kernel_quadratic_norm: vector has length " << v.size()
       << " but the kernel has m = " << kernel.m();
    throw ShapeError(os.str());
  }
  Eigen::VectorXd w = v;
  kernel.whiten_in_place(w);
  return w.squaredNorm();
}

enum class Side { kLeft, kRight };

// kLeft: M X (X has m rows). kRight: X M^T (X has m columns).
inline Eigen::MatrixXd kernel_factor_apply(
    const StableSplineKernel& kernel,
    const Eigen::Ref<const Eigen::MatrixXd>& X, Side side) {
  const auto L = kernel.factor().triangularView<Eigen::Lower>();
  if (side == Side::kLeft) {
    if (X.rows() != kernel.m()) {
      throw ShapeError("kernel_factor_apply(left): X must have m rows");
    }
    return L * X;
  }
  if (X.cols() != kernel.m()) {
    throw ShapeError("kernel_factor_apply(right): X must have m columns");
  }
  return X * L.transpose();
}

}  // namespace sshnet

#endif  // SSHNET_KERNEL_HPP_
