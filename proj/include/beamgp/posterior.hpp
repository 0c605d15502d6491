#pragma once

#include <Eigen/Core>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "beamgp/covariance.hpp"
#include "beamgp/dataset.hpp"
#include "beamgp/errors.hpp"

namespace beamgp {

/// The optimizable parameter vector psi: kernel hyperparameters, bending
/// stiffness, and one noise std per Learnable observation set.
struct ParamVector {
  double sigma_s = 1.0;
  double ell = 1.0;
  double ei = 1.0;
  std::vector<double> noise_sigmas;

  std::size_t dim() const { return 3 + noise_sigmas.size(); }

  Eigen::VectorXd to_vector() const {
    Eigen::VectorXd v(static_cast<Eigen::Index>(dim()));
    v[0] = sigma_s;
    v[1] = ell;
    v[2] = ei;
    for (std::size_t i = 0; i < noise_sigmas.size(); ++i)
      v[static_cast<Eigen::Index>(3 + i)] = noise_sigmas[i];
    return v;
  }

  static ParamVector from_vector(const Eigen::VectorXd& v) {
    if (v.size() < 3) throw ContractViolation("parameter vector needs at least 3 entries");
    ParamVector p;
    p.sigma_s = v[0];
    p.ell = v[1];
    p.ei = v[2];
    p.noise_sigmas.assign(v.data() + 3, v.data() + v.size());
    return p;
  }

  bool all_positive() const {
    if (!(sigma_s > 0.0) || !(ell > 0.0) || !(ei > 0.0)) return false;
    for (double s : noise_sigmas)
      if (!(s > 0.0)) return false;
    return true;
  }

  KernelParams kernel_params() const { return {sigma_s, ell}; }
};

/// Names the coordinates of psi for a given problem.
struct ParamLayout {
  std::vector<std::string> names;

  static ParamLayout from_problem(const Problem& problem) {
    ParamLayout layout;
    layout.names = {"sigma_s", "ell", "ei"};
    for (const std::string& label : problem.learnable_labels())
      layout.names.push_back("sigma[" + label + "]");
    return layout;
  }

  std::size_t dim() const { return names.size(); }
};

/// Independent uniform interval priors, possibly unbounded on either side.
struct PriorSpec {
  struct Interval {
    double lower = -std::numeric_limits<double>::infinity();
    double upper = std::numeric_limits<double>::infinity();
  };

  std::vector<Interval> bounds;  // aligned with ParamVector::to_vector()

  /// Unbounded priors on sigma_s, ell and the noise stds (or the set's own
  /// Learnable bounds), and U(0.1, 2.0)*ei_ref on the stiffness.
  static PriorSpec defaults(const Problem& problem, double ei_ref) {
    if (!(ei_ref > 0.0)) throw ConfigError("reference stiffness ei_ref must be positive");
    PriorSpec prior;
    prior.bounds.push_back({0.0, std::numeric_limits<double>::infinity()});  // sigma_s
    prior.bounds.push_back({0.0, std::numeric_limits<double>::infinity()});  // ell
    prior.bounds.push_back({0.1 * ei_ref, 2.0 * ei_ref});                    // ei
    for (const ObservationSet& s : problem.observation_sets)
      if (s.noise.is_learnable()) prior.bounds.push_back({s.noise.lower, s.noise.upper});
    return prior;
  }

  void validate() const {
    for (const Interval& b : bounds)
      if (!(b.lower < b.upper)) throw ConfigError("prior bounds must satisfy lower < upper");
  }
};

/// Sum of per-parameter log densities. Bounded intervals contribute
/// -log(width); unbounded ones contribute 0 (improper prior convention).
/// Out-of-bounds parameters give -infinity.
inline double log_prior(const ParamVector& psi, const PriorSpec& prior) {
  const Eigen::VectorXd v = psi.to_vector();
  if (prior.bounds.size() != static_cast<std::size_t>(v.size()))
    throw ContractViolation("prior specification does not match the parameter count");
  double acc = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const auto& b = prior.bounds[static_cast<std::size_t>(i)];
    if (!(v[i] >= b.lower && v[i] <= b.upper))
      return -std::numeric_limits<double>::infinity();
    const double width = b.upper - b.lower;
    if (std::isfinite(width)) acc -= std::log(width);
  }
  return acc;
}

/// Gaussian log marginal likelihood -1/2 y'K^-1 y - 1/2 log|K| - N/2 log 2pi,
/// evaluated through the stabilized Cholesky factor. Throws NumericalError if
/// the covariance cannot be factorized (the sampler maps that to -infinity).
inline double log_likelihood(const Problem& problem, const ParamVector& psi,
                             const JitterPolicy& jitter = JitterPolicy{},
                             const FieldSigns& signs = FieldSigns{}) {
  AssembledCovariance cov =
      assemble(problem, psi.kernel_params(), psi.ei, psi.noise_sigmas, signs);
  const CovarianceFactor factor = factorize(cov, jitter);
  const Eigen::VectorXd y = concat_values(problem);
  const Eigen::VectorXd w = factor.half_solve(y);
  const double n = static_cast<double>(y.size());
  return -0.5 * w.squaredNorm() - 0.5 * factor.log_det() -
         0.5 * n * std::log(2.0 * std::numbers::pi);
}

/// Unnormalized log posterior. A -infinity prior short-circuits the likelihood
/// (the covariance is never assembled).
inline double log_posterior(const Problem& problem, const ParamVector& psi,
                            const PriorSpec& prior,
                            const JitterPolicy& jitter = JitterPolicy{},
                            const FieldSigns& signs = FieldSigns{}) {
  const double lp = log_prior(psi, prior);
  if (lp == -std::numeric_limits<double>::infinity()) return lp;
  return lp + log_likelihood(problem, psi, jitter, signs);
}

}  // namespace beamgp
