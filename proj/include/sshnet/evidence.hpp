#ifndef SSHNET_EVIDENCE_HPP_
#define SSHNET_EVIDENCE_HPP_

#include <cstdint>
#include <limits>
#include <sstream>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "sshnet/errors.hpp"
#include "sshnet/gibbs.hpp"
#include "sshnet/kernel.hpp"
#include "sshnet/marginal_likelihood.hpp"
#include "sshnet/parallel.hpp"
#include "sshnet/regressors.hpp"

namespace sshnet {

constexpr std::int64_t kDefaultEvidenceStride = 50;

struct EvidenceHyperparams {
  double sigma2 = 0.0;
  Eigen::VectorXd lambda2;
  double tau2 = 0.0;
};

// Optimized evidence for one alpha: the trace of the objective along the
// chain and its joint maximizer.
struct EvidenceRecord {
  double alpha = 0.0;
  std::vector<std::pair<std::int64_t, double>> log_ml_trace;
  double best_log_ml = -std::numeric_limits<double>::infinity();
  EvidenceHyperparams best_hyperparams;
};

inline EvidenceRecord make_evidence_record(const ChainRecord& chain) {
  EvidenceRecord rec;
  rec.alpha = chain.alpha;
  for (const auto& pt : chain.evidence) {
    rec.log_ml_trace.emplace_back(pt.sweep, pt.log_ml);
    if (pt.log_ml > rec.best_log_ml) {
      rec.best_log_ml = pt.log_ml;
      rec.best_hyperparams = {pt.sigma2, pt.lambda2, pt.tau2};
    }
  }
  return rec;
}

// Index of the record with the largest best_log_ml; ties go to the smaller
// alpha.
inline std::size_t pick_alpha(const std::vector<EvidenceRecord>& records) {
  if (records.empty()) throw ParameterError("select_alpha: empty alpha grid");
  std::size_t best = 0;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& a = records[i];
    const auto& b = records[best];
    if (a.best_log_ml > b.best_log_ml ||
        (a.best_log_ml == b.best_log_ml && a.alpha < b.alpha)) {
      best = i;
    }
  }
  return best;
}

struct AlphaSelection {
  double alpha_best = 0.0;
  std::size_t best_index = 0;
  std::vector<EvidenceRecord> records;
  std::vector<ChainRecord> chains;  // one per grid value, same order
};

// Runs one chain per grid value (in parallel, capped by SSHNET_THREADS) with
// the evidence evaluated every `evidence_stride` sweeps (default 50) and
// returns the alpha whose maximized evidence is largest.
inline AlphaSelection select_alpha(const std::vector<double>& grid,
                                   const Eigen::Ref<const Eigen::VectorXd>& Y,
                                   const RegressorSet& regs, ChainConfig config) {
  if (grid.empty()) throw ParameterError("select_alpha: empty alpha grid");
  for (double a : grid) {
    if (!(a >= kMinAlpha && a <= kMaxAlpha)) {
      std::ostringstream os;
      os << "select_alpha: grid value " << a << " is outside [" << kMinAlpha << ", "
         << kMaxAlpha << "]";
      throw ParameterError(os.str());
    }
  }
  if (!config.evidence_stride) config.evidence_stride = kDefaultEvidenceStride;
  config.validate();

  const Eigen::VectorXd y = Y;
  AlphaSelection out;
  out.chains.resize(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) {
    try {
      const StableSplineKernel kernel(regs.m(), grid[i]);
      out.chains[i] = run_chain(y, regs, kernel, config);
    } catch (const Error& e) {
      std::ostringstream os;
      os << e.what() << " (alpha = " << grid[i] << ")";
      throw NumericalError(os.str());
    }
  });
  for (const auto& chain : out.chains) out.records.push_back(make_evidence_record(chain));
  out.best_index = pick_alpha(out.records);
  out.alpha_best = grid[out.best_index];
  return out;
}

}  // namespace sshnet

#endif  // SSHNET_EVIDENCE_HPP_
