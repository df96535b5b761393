#ifndef SSHNET_DISTRIBUTIONS_HPP_
#define SSHNET_DISTRIBUTIONS_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

#include <Eigen/Dense>

#include "sshnet/errors.hpp"

namespace sshnet {

// Seeded random stream. The engine (mt19937_64) and its seeding through
// std::seed_seq are fully specified by the standard, and every distribution
// below is implemented here rather than taken from <random>, so sequences are
// identical across platforms. Single owner; never share between threads.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0)
      : seed_(seed), stream_id_(stream_id) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream_id),
                      static_cast<std::uint32_t>(stream_id >> 32),
                      0x5348u};
    engine_.seed(seq);
  }

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  // Independent stream for chain / run `index`, derived from this seed.
  RngStream derive(std::uint64_t index) const {
    return RngStream(seed_, stream_id_ * 0x9E3779B97F4A7C15ull + index + 1);
  }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on (0, 1): 53-bit midpoint grid, never 0 or 1.
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal via the Marsaglia polar method; the second variate of
  // each accepted pair is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

  // Gamma(shape, rate) by Marsaglia & Tsang; shape < 1 uses the
  // U^{1/shape} boost.
  double gamma(double shape, double rate) {
    if (!(shape > 0.0) || !(rate > 0.0)) {
      std::ostringstream os;
      os << "gamma: shape and rate must be positive (shape = " << shape
         << ", rate = " << rate << ")";
      throw ParameterError(os.str());
    }
    if (shape < 1.0) {
      const double g = gamma(shape + 1.0, 1.0);
      return g * std::pow(uniform(), 1.0 / shape) / rate;
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform();
      const double x2 = x * x;
      if (u < 1.0 - 0.0331 * x2 * x2) return d * v / rate;
      if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) {
        return d * v / rate;
      }
    }
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Inverse-gamma I_g(a, b) with density b^a / Gamma(a) x^{-a-1} exp(-b / x).
struct InverseGammaParams {
  double shape;
  double scale;

  void validate() const {
    if (!(shape > 0.0) || !(scale > 0.0)) {
      std::ostringstream os;
      os << "inverse-gamma parameters must be positive (a = " << shape
         << ", b = " << scale << ")";
      throw ParameterError(os.str());
    }
  }

  double mean() const { return shape > 1.0 ? scale / (shape - 1.0) : INFINITY; }
};

inline double sample_inverse_gamma(const InverseGammaParams& params,
                                   RngStream& rng) {
  params.validate();
  return 1.0 / rng.gamma(params.shape, params.scale);
}

// Standard half-Cauchy C+(0, 1) by inverse CDF.
inline double sample_half_cauchy(RngStream& rng) {
  return std::tan(0.5 * std::numbers::pi * rng.uniform());
}

struct HalfCauchyMixtureDraw {
  double lambda2;
  double nu;
};

// nu ~ I_g(1/2, 1), lambda2 | nu ~ I_g(1/2, 1/nu); sqrt(lambda2) ~ C+(0, 1).
inline HalfCauchyMixtureDraw sample_half_cauchy_via_mixture(RngStream& rng) {
  HalfCauchyMixtureDraw d;
  d.nu = sample_inverse_gamma({0.5, 1.0}, rng);
  d.lambda2 = sample_inverse_gamma({0.5, 1.0 / d.nu}, rng);
  return d;
}

// mean + A * omega with omega i.i.d. N(0, 1).
inline Eigen::VectorXd sample_gaussian_factored(
    const Eigen::Ref<const Eigen::VectorXd>& mean,
    const Eigen::Ref<const Eigen::MatrixXd>& A, RngStream& rng) {
  if (A.rows() != mean.size()) {
    throw ShapeError("sample_gaussian_factored: factor rows must match mean");
  }
  Eigen::VectorXd omega(A.cols());
  for (Eigen::Index i = 0; i < omega.size(); ++i) omega(i) = rng.normal();
  return mean + A * omega;
}

// Shrinkage weight c_i = a l2 / (1 + a l2) with a = alpha^{i-1}.
inline double shrinkage_coefficient(int i, double alpha, double lambda2) {
  const double scaled = std::pow(alpha, i - 1) * lambda2;
  if (scaled == 0.0) return 0.0;
  return 1.0 / (1.0 + 1.0 / scaled);
}

inline double sample_shrinkage_coefficient(int i, double alpha,
                                           RngStream& rng) {
  const double lambda = sample_half_cauchy(rng);
  return shrinkage_coefficient(i, alpha, lambda * lambda);
}

// Right-closed bins (x - width, x] covering (0, 1].
struct Histogram {
  double bin_width = 0.0;
  std::vector<double> right_edges;
  std::vector<double> probabilities;
};

inline Histogram shrinkage_profile(int i, double alpha, std::size_t n_samples,
                                   double bin_width, RngStream& rng) {
  if (i < 1) throw ParameterError("shrinkage_profile: index i must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ParameterError("shrinkage_profile: alpha must lie in (0, 1)");
  }
  if (n_samples == 0) {
    throw ParameterError("shrinkage_profile: n_samples must be positive");
  }
  const double bins_real = 1.0 / bin_width;
  const long n_bins = std::lround(bins_real);
  if (!(bin_width > 0.0) || n_bins < 1 ||
      std::abs(static_cast<double>(n_bins) * bin_width - 1.0) > 1e-9) {
    std::ostringstream os;
    os << "shrinkage_profile: bin width " << bin_width
       << " does not divide the unit interval evenly";
    throw ParameterError(os.str());
  }

  Histogram h;
  h.bin_width = bin_width;
  h.right_edges.resize(static_cast<std::size_t>(n_bins));
  for (long b = 0; b < n_bins; ++b) {
    h.right_edges[static_cast<std::size_t>(b)] =
        static_cast<double>(b + 1) / static_cast<double>(n_bins);
  }
  std::vector<std::size_t> counts(static_cast<std::size_t>(n_bins), 0);
  for (std::size_t s = 0; s < n_samples; ++s) {
    const double c = sample_shrinkage_coefficient(i, alpha, rng);
    long b = static_cast<long>(std::ceil(c * static_cast<double>(n_bins))) - 1;
    b = std::clamp(b, 0L, n_bins - 1);
    ++counts[static_cast<std::size_t>(b)];
  }
  h.probabilities.resize(counts.size());
  for (std::size_t b = 0; b < counts.size(); ++b) {
    h.probabilities[b] =
        static_cast<double>(counts[b]) / static_cast<double>(n_samples);
  }
  return h;
}

}  // namespace sshnet

#endif  // SSHNET_DISTRIBUTIONS_HPP_
