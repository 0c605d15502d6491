#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <span>
#include <string>
#include <vector>

#include "beamgp/dataset.hpp"
#include "beamgp/errors.hpp"
#include "beamgp/kernel.hpp"

namespace beamgp {

struct BlockRange {
  std::size_t offset = 0;
  std::size_t size = 0;
};

/// The global covariance over all observation sets: cross-kernel blocks plus
/// per-set diagonal noise.
struct AssembledCovariance {
  Eigen::MatrixXd matrix;
  std::vector<BlockRange> blocks;      // aligned with Problem::expanded_sets()
  std::vector<double> set_sigmas;      // resolved noise std per set (0 for virtual)
  double jitter_used = 0.0;            // filled by factorize()
};

/// Concatenation of all observation values in block order (the y of the model).
inline Eigen::VectorXd concat_values(const Problem& problem) {
  Eigen::VectorXd y(static_cast<Eigen::Index>(problem.total_observations()));
  Eigen::Index row = 0;
  for (const ObservationSet& s : problem.expanded_sets())
    for (double v : s.values) y[row++] = v;
  return y;
}

/// Builds K_p for the given hyperparameters. `learnable_sigmas` supplies one
/// noise std per Learnable set, in block order; Known sets use their own sigma.
inline AssembledCovariance assemble(const Problem& problem, const KernelParams& params,
                                    double ei, std::span<const double> learnable_sigmas,
                                    const FieldSigns& signs = FieldSigns{}) {
  params.validate();
  if (!(ei > 0.0)) throw DomainError("bending stiffness EI must be positive");

  const std::vector<ObservationSet> sets = problem.expanded_sets();
  AssembledCovariance cov;
  cov.blocks.reserve(sets.size());
  cov.set_sigmas.reserve(sets.size());

  std::size_t n = 0;
  std::size_t learn_idx = 0;
  std::vector<FieldOperator> ops;
  ops.reserve(sets.size());
  for (const ObservationSet& s : sets) {
    cov.blocks.push_back({n, s.size()});
    n += s.size();
    ops.push_back(field_operator(s.kind, ei, problem.fiber_distance, signs));
    if (s.noise.is_learnable()) {
      if (learn_idx >= learnable_sigmas.size())
        throw ContractViolation("missing noise sigma for learnable set '" + s.label + "'");
      const double sigma = learnable_sigmas[learn_idx++];
      if (!(sigma > 0.0))
        throw DomainError("noise sigma for set '" + s.label + "' must be positive");
      cov.set_sigmas.push_back(sigma);
    } else {
      cov.set_sigmas.push_back(s.noise.sigma);
    }
  }
  if (learn_idx != learnable_sigmas.size())
    throw ContractViolation("too many noise sigmas supplied");

  cov.matrix.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t a = 0; a < sets.size(); ++a) {
    for (std::size_t b = a; b < sets.size(); ++b) {
      const BlockRange ra = cov.blocks[a];
      const BlockRange rb = cov.blocks[b];
      for (std::size_t i = 0; i < ra.size; ++i) {
        const std::size_t j0 = (a == b) ? i : 0;
        for (std::size_t j = j0; j < rb.size; ++j) {
          const double value = detail::apply_operators(params, ops[a], ops[b],
                                                       sets[a].locations[i],
                                                       sets[b].locations[j]);
          const auto gi = static_cast<Eigen::Index>(ra.offset + i);
          const auto gj = static_cast<Eigen::Index>(rb.offset + j);
          cov.matrix(gi, gj) = value;
          cov.matrix(gj, gi) = value;
        }
      }
    }
  }
  // Eq.-9-style noise: one sigma per dataset, on the exact diagonal only.
  for (std::size_t a = 0; a < sets.size(); ++a) {
    const double s2 = cov.set_sigmas[a] * cov.set_sigmas[a];
    if (s2 == 0.0) continue;
    for (std::size_t i = 0; i < cov.blocks[a].size; ++i) {
      const auto gi = static_cast<Eigen::Index>(cov.blocks[a].offset + i);
      cov.matrix(gi, gi) += s2;
    }
  }
  return cov;
}

/// Jitter escalation policy, relative to trace(K)/N.
struct JitterPolicy {
  double initial_rel = 1e-10;
  double growth = 10.0;
  double max_rel = 1e-4;
};

/// Lower-triangular Cholesky factor of K_p + jitter*I.
class CovarianceFactor {
 public:
  CovarianceFactor(Eigen::MatrixXd lower, double jitter)
      : lower_(std::move(lower)), jitter_(jitter) {}

  Eigen::Index size() const { return lower_.rows(); }
  double jitter_used() const { return jitter_; }
  const Eigen::MatrixXd& lower() const { return lower_; }

  /// Solves (L L^T) x = b.
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const {
    Eigen::VectorXd x = lower_.triangularView<Eigen::Lower>().solve(b);
    lower_.triangularView<Eigen::Lower>().transpose().solveInPlace(x);
    return x;
  }

  /// Solves L W = B (half solve; useful for predictive variance).
  Eigen::MatrixXd half_solve(const Eigen::MatrixXd& b) const {
    return lower_.triangularView<Eigen::Lower>().solve(b);
  }

  double log_det() const {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < lower_.rows(); ++i) acc += std::log(lower_(i, i));
    return 2.0 * acc;
  }

 private:
  Eigen::MatrixXd lower_;
  double jitter_;
};

/// Factorizes K_p + jitter*I, escalating the jitter geometrically until the
/// Cholesky succeeds. Throws NumericalError past the policy maximum (typical
/// of degenerate hyperparameters, e.g. ell much larger than the beam).
inline CovarianceFactor factorize(AssembledCovariance& cov,
                                  const JitterPolicy& policy = JitterPolicy{}) {
  const Eigen::Index n = cov.matrix.rows();
  if (n == 0) throw ContractViolation("cannot factorize an empty covariance");
  double scale = cov.matrix.trace() / static_cast<double>(n);
  if (!(scale > 0.0) || !std::isfinite(scale)) scale = 1.0;

  double jitter = policy.initial_rel * scale;
  if (!(jitter > 0.0)) jitter = std::numeric_limits<double>::min();
  const double max_jitter = policy.max_rel * scale;
  while (true) {
    Eigen::MatrixXd shifted = cov.matrix;
    shifted.diagonal().array() += jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(shifted);
    if (llt.info() == Eigen::Success && std::isfinite(llt.matrixLLT()(n - 1, n - 1))) {
      cov.jitter_used = jitter;
      return CovarianceFactor(llt.matrixL(), jitter);
    }
    jitter *= policy.growth;
    if (!(jitter <= max_jitter))
      throw NumericalError("covariance not positive definite within jitter budget (max " +
                           std::to_string(max_jitter) + ")");
  }
}

}  // namespace beamgp
