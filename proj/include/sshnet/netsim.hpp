#ifndef SSHNET_NETSIM_HPP_
#define SSHNET_NETSIM_HPP_

#include <algorithm>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sshnet/distributions.hpp"
#include "sshnet/errors.hpp"
#include "sshnet/regressors.hpp"

namespace sshnet {

constexpr int kModuleOrder = 10;
constexpr double kMaxRootMagnitude = 0.95;
constexpr double kMinTargetNorm = 0.2;
constexpr double kMaxTargetNorm = 1.0;
constexpr Eigen::Index kMinSimulatedFirLength = 20;

enum class InputKind { kWhite, kLowpass };

inline std::string to_string(InputKind kind) {
  return kind == InputKind::kWhite ? "white" : "lowpass";
}

inline InputKind parse_input_kind(const std::string& s) {
  if (s == "white") return InputKind::kWhite;
  if (s == "lowpass") return InputKind::kLowpass;
  throw UsageError("unknown input kind '" + s + "' (expected white|lowpass)");
}

struct RandomModuleSpec {
  std::vector<std::complex<double>> poles;
  std::vector<std::complex<double>> zeros;
  double target_norm = 1.0;
};

namespace detail {

// Adds a real root or a conjugate pair with equal probability until `order`
// roots are present. A pair that would overshoot is replaced by a real root.
inline std::vector<std::complex<double>> draw_roots(int order, RngStream& rng) {
  std::vector<std::complex<double>> roots;
  roots.reserve(static_cast<std::size_t>(order));
  while (static_cast<int>(roots.size()) < order) {
    const bool room_for_pair = static_cast<int>(roots.size()) + 2 <= order;
    const bool add_real = !room_for_pair || rng.uniform() < 0.5;
    if (add_real) {
      roots.emplace_back(-kMaxRootMagnitude + 2.0 * kMaxRootMagnitude * rng.uniform(),
                         0.0);
    } else {
      const double radius = kMaxRootMagnitude * rng.uniform();
      const double phase = std::numbers::pi * rng.uniform();
      const auto root = std::polar(radius, phase);
      roots.push_back(root);
      roots.push_back(std::conj(root));
    }
  }
  return roots;
}

// Monic polynomial coefficients, highest power first. Conjugate pairs must be
// adjacent (as produced by draw_roots).
inline std::vector<double> monic_from_roots(
    const std::vector<std::complex<double>>& roots) {
  std::vector<double> c{1.0};
  auto multiply = [&c](const std::vector<double>& f) {
    std::vector<double> out(c.size() + f.size() - 1, 0.0);
    for (std::size_t i = 0; i < c.size(); ++i) {
      for (std::size_t j = 0; j < f.size(); ++j) out[i + j] += c[i] * f[j];
    }
    c = std::move(out);
  };
  for (std::size_t i = 0; i < roots.size(); ++i) {
    const auto& r = roots[i];
    if (r.imag() == 0.0) {
      multiply({1.0, -r.real()});
    } else {
      multiply({1.0, -2.0 * r.real(), std::norm(r)});
      ++i;  // skip the conjugate
    }
  }
  return c;
}

}  // namespace detail

inline RandomModuleSpec draw_module_spec(RngStream& rng) {
  RandomModuleSpec spec;
  spec.poles = detail::draw_roots(kModuleOrder, rng);
  spec.zeros = detail::draw_roots(kModuleOrder - 1, rng);
  spec.target_norm =
      kMinTargetNorm + (kMaxTargetNorm - kMinTargetNorm) * rng.uniform();
  return spec;
}

// First m impulse-response samples h(0), ..., h(m-1) of N(z)/D(z), computed
// by the difference-equation recursion and rescaled to spec.target_norm.
inline Eigen::VectorXd impulse_response(const RandomModuleSpec& spec,
                                        Eigen::Index m) {
  const auto den = detail::monic_from_roots(spec.poles);
  const auto num = detail::monic_from_roots(spec.zeros);
  const std::size_t delay = den.size() - num.size();

  Eigen::VectorXd h = Eigen::VectorXd::Zero(m);
  for (Eigen::Index t = 0; t < m; ++t) {
    double v = 0.0;
    const auto ut = static_cast<std::size_t>(t);
    if (ut >= delay && ut - delay < num.size()) v = num[ut - delay];
    for (std::size_t i = 1; i < den.size() && i <= ut; ++i) {
      v -= den[i] * h(t - static_cast<Eigen::Index>(i));
    }
    h(t) = v;
  }
  const double norm = h.norm();
  if (norm > 0.0) h *= spec.target_norm / norm;
  return h;
}

inline Eigen::VectorXd random_impulse_response(Eigen::Index m, RngStream& rng) {
  if (m < kMinSimulatedFirLength) {
    std::ostringstream os;
    os << "random_impulse_response: m = " << m << " is below the minimum "
       << kMinSimulatedFirLength;
    throw ParameterError(os.str());
  }
  return impulse_response(draw_module_spec(rng), m);
}

// white: i.i.d. N(0, 1). lowpass: x(t) = 0.9 x(t-1) + w(t-1), x(0) = 0.
inline Eigen::VectorXd generate_input(InputKind kind, Eigen::Index n_raw,
                                      RngStream& rng) {
  if (n_raw < 1) throw ParameterError("generate_input: n_raw must be >= 1");
  Eigen::VectorXd x(n_raw);
  if (kind == InputKind::kWhite) {
    for (Eigen::Index t = 0; t < n_raw; ++t) x(t) = rng.normal();
    return x;
  }
  x(0) = 0.0;
  for (Eigen::Index t = 1; t < n_raw; ++t) x(t) = 0.9 * x(t - 1) + rng.normal();
  return x;
}

struct NetworkDataset {
  Eigen::Index n = 0;
  Eigen::Index m = 0;
  Eigen::Index p = 0;
  std::uint64_t seed = 0;
  InputKind input_kind = InputKind::kWhite;
  std::vector<Eigen::VectorXd> inputs;  // p vectors of length n + m - 1
  Eigen::VectorXd outputs;              // n
  std::optional<Eigen::MatrixXd> truth;  // m x p, column k = theta_k
  std::optional<double> sigma2_true;
  std::optional<std::vector<int>> active_set;  // 0-based, ascending
  std::optional<Eigen::VectorXd> noiseless;    // in-memory only

  RegressorSet regressors() const { return RegressorSet(inputs, n, m); }
};

// Unbiased sample variance.
inline double sample_variance(const Eigen::Ref<const Eigen::VectorXd>& z) {
  if (z.size() < 2) return 0.0;
  const double mean = z.mean();
  return (z.array() - mean).square().sum() / static_cast<double>(z.size() - 1);
}

// Linear SNR: sample_variance(noiseless) / sigma2_true = snr. With q = 0 the
// noise variance is 1.
inline NetworkDataset synthesize_dataset(Eigen::Index p, Eigen::Index q,
                                         Eigen::Index n, Eigen::Index m,
                                         double snr, InputKind kind,
                                         RngStream& rng) {
  if (p < 1) throw ParameterError("synthesize_dataset: p must be >= 1");
  if (q < 0 || q > p) {
    std::ostringstream os;
    os << "synthesize_dataset: q = " << q << " must lie in [0, p = " << p << "]";
    throw ParameterError(os.str());
  }
  if (n < 1) throw ParameterError("synthesize_dataset: n must be >= 1");
  if (m < kMinSimulatedFirLength) {
    throw ParameterError("synthesize_dataset: m must be >= 20");
  }
  if (!(snr > 0.0)) throw ParameterError("synthesize_dataset: snr must be > 0");

  NetworkDataset ds;
  ds.n = n;
  ds.m = m;
  ds.p = p;
  ds.seed = rng.seed();
  ds.input_kind = kind;

  // partial Fisher-Yates
  std::vector<int> indices(static_cast<std::size_t>(p));
  for (int k = 0; k < static_cast<int>(p); ++k) indices[static_cast<std::size_t>(k)] = k;
  for (Eigen::Index i = 0; i < q; ++i) {
    const auto remaining = static_cast<double>(p - i);
    auto j = i + static_cast<Eigen::Index>(rng.uniform() * remaining);
    j = std::min(j, p - 1);
    std::swap(indices[static_cast<std::size_t>(i)], indices[static_cast<std::size_t>(j)]);
  }
  std::vector<int> active(indices.begin(), indices.begin() + q);
  std::sort(active.begin(), active.end());

  Eigen::MatrixXd truth = Eigen::MatrixXd::Zero(m, p);
  for (int k : active) truth.col(k) = random_impulse_response(m, rng);

  ds.inputs.reserve(static_cast<std::size_t>(p));
  for (Eigen::Index k = 0; k < p; ++k) {
    ds.inputs.push_back(generate_input(kind, n + m - 1, rng));
  }

  const Eigen::VectorXd z = predict(ds.regressors(), truth);
  const double sigma2 = q == 0 ? 1.0 : sample_variance(z) / snr;
  if (!(sigma2 > 0.0)) {
    throw NumericalError("synthesize_dataset: noiseless output has zero variance");
  }
  const double sd = std::sqrt(sigma2);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) y(i) = z(i) + sd * rng.normal();

  ds.outputs = std::move(y);
  ds.truth = std::move(truth);
  ds.sigma2_true = sigma2;
  ds.active_set = std::move(active);
  ds.noiseless = z;
  return ds;
}

}  // namespace sshnet

#endif  // SSHNET_NETSIM_HPP_
