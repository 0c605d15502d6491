#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "beamgp/covariance.hpp"
#include "beamgp/dataset.hpp"
#include "beamgp/detail/text.hpp"
#include "beamgp/errors.hpp"
#include "beamgp/posterior.hpp"
#include "beamgp/sampler.hpp"

namespace beamgp {

struct GaussianPrediction {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
  double jitter_used = 0.0;
};

struct PredictOptions {
  JitterPolicy jitter;
  FieldSigns signs;
  bool keep_component_means = false;
  /// Adds sigma^2 to the predictive variance (posterior-predictive checks of a
  /// noisy re-measurement); 0 predicts the latent function.
  double extra_noise_sigma = 0.0;
};

/// Standard GP conditional at fixed psi: mean K*' K^-1 y and covariance
/// K** - K*' K^-1 K*, with K* stacking the cross-kernels between every
/// training set's kind and the query kind.
inline GaussianPrediction predict_conditional(const Problem& problem, const ParamVector& psi,
                                              QuantityKind kind,
                                              const std::vector<double>& x_star,
                                              const PredictOptions& opts = PredictOptions{}) {
  if (x_star.empty()) throw ContractViolation("prediction needs at least one query location");
  AssembledCovariance cov =
      assemble(problem, psi.kernel_params(), psi.ei, psi.noise_sigmas, opts.signs);
  const CovarianceFactor factor = factorize(cov, opts.jitter);
  const Eigen::VectorXd y = concat_values(problem);

  const std::vector<ObservationSet> sets = problem.expanded_sets();
  const KernelParams kp = psi.kernel_params();
  const FieldOperator query_op = field_operator(kind, psi.ei, problem.fiber_distance, opts.signs);

  const auto n = static_cast<Eigen::Index>(y.size());
  const auto m = static_cast<Eigen::Index>(x_star.size());
  Eigen::MatrixXd k_star(n, m);
  for (std::size_t a = 0; a < sets.size(); ++a) {
    const FieldOperator set_op =
        field_operator(sets[a].kind, psi.ei, problem.fiber_distance, opts.signs);
    for (std::size_t i = 0; i < sets[a].size(); ++i) {
      const auto row = static_cast<Eigen::Index>(cov.blocks[a].offset + i);
      for (Eigen::Index j = 0; j < m; ++j)
        k_star(row, j) = detail::apply_operators(kp, set_op, query_op, sets[a].locations[i],
                                                 x_star[static_cast<std::size_t>(j)]);
    }
  }

  Eigen::MatrixXd k_star_star(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = i; j < m; ++j) {
      const double v = detail::apply_operators(kp, query_op, query_op,
                                               x_star[static_cast<std::size_t>(i)],
                                               x_star[static_cast<std::size_t>(j)]);
      k_star_star(i, j) = v;
      k_star_star(j, i) = v;
    }

  GaussianPrediction out;
  out.jitter_used = factor.jitter_used();
  out.mean = k_star.transpose() * factor.solve(y);
  const Eigen::MatrixXd half = factor.half_solve(k_star);
  out.covariance = k_star_star - half.transpose() * half;
  if (opts.extra_noise_sigma > 0.0)
    out.covariance.diagonal().array() += opts.extra_noise_sigma * opts.extra_noise_sigma;
  return out;
}

/// Posterior predictive marginals at the query locations, marginalized over
/// parameter draws as an equally weighted Gaussian mixture.
struct PredictiveResult {
  QuantityKind kind = QuantityKind::Deflection;
  std::vector<double> locations;
  Eigen::VectorXd mean;
  Eigen::VectorXd std_dev;
  std::vector<Eigen::VectorXd> per_sample_means;  // kept when requested
  std::vector<std::string> warnings;
};

/// Evaluates the conditional for `n_draws` equally spaced chain samples and
/// reduces with the law of total variance. Failed components are skipped with
/// a warning; if every component fails, throws NumericalError.
inline PredictiveResult predict_mixture(const Problem& problem, const Chain& chain,
                                        QuantityKind kind, const std::vector<double>& x_star,
                                        std::size_t n_draws = 200,
                                        const PredictOptions& opts = PredictOptions{}) {
  if (chain.size() == 0) throw ContractViolation("predict_mixture needs a nonempty chain");
  if (n_draws == 0 || n_draws > chain.size())
    throw ContractViolation("n_draws must lie in [1, chain length]");
  const ParamLayout layout = ParamLayout::from_problem(problem);
  if (chain.dim() != layout.dim())
    throw ConfigError("chain dimension " + std::to_string(chain.dim()) +
                      " does not match the dataset's parameter count " +
                      std::to_string(layout.dim()));
  if (!chain.param_names.empty() && chain.param_names != layout.names)
    throw ConfigError("chain parameter names do not match the dataset's layout");

  PredictiveResult result;
  result.kind = kind;
  result.locations = x_star;
  for (double x : x_star)
    if (x < 0.0 || x > problem.length) {
      result.warnings.push_back("query location outside [0, L]: extrapolating");
      break;
    }

  const auto m = static_cast<Eigen::Index>(x_star.size());
  Eigen::VectorXd mean_acc = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd second_moment_acc = Eigen::VectorXd::Zero(m);
  std::size_t n_ok = 0;

  for (std::size_t d = 0; d < n_draws; ++d) {
    const std::size_t idx = d * chain.size() / n_draws;
    const ParamVector psi = ParamVector::from_vector(chain.samples[idx]);
    GaussianPrediction component;
    try {
      component = predict_conditional(problem, psi, kind, x_star, opts);
    } catch (const NumericalError& e) {
      result.warnings.push_back("mixture component " + std::to_string(idx) +
                                " skipped: " + e.what());
      continue;
    }
    mean_acc += component.mean;
    second_moment_acc += component.covariance.diagonal() + component.mean.cwiseAbs2();
    if (opts.keep_component_means) result.per_sample_means.push_back(component.mean);
    ++n_ok;
  }
  if (n_ok == 0) throw NumericalError("every mixture component failed to evaluate");

  result.mean = mean_acc / static_cast<double>(n_ok);
  const Eigen::VectorXd variance =
      (second_moment_acc / static_cast<double>(n_ok) - result.mean.cwiseAbs2())
          .cwiseMax(0.0);
  result.std_dev = variance.cwiseSqrt();
  return result;
}

/// Prediction CSV: `kind,x,mean,std` rows.
inline void write_prediction_csv_stream(const PredictiveResult& result, std::ostream& out) {
  out << "kind,x,mean,std\n";
  for (std::size_t i = 0; i < result.locations.size(); ++i)
    out << kind_tag(result.kind) << ',' << detail::format_double(result.locations[i]) << ','
        << detail::format_double(result.mean[static_cast<Eigen::Index>(i)]) << ','
        << detail::format_double(result.std_dev[static_cast<Eigen::Index>(i)]) << '\n';
}

inline void write_prediction_csv(const PredictiveResult& result, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write prediction file: " + path);
  write_prediction_csv_stream(result, out);
  if (!out) throw IoError("failed while writing prediction file: " + path);
}

}  // namespace beamgp
