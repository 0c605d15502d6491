#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "beamgp/dataset.hpp"
#include "beamgp/errors.hpp"
#include "beamgp/posterior.hpp"
#include "beamgp/sampler.hpp"

namespace beamgp {

/// Normalized stiffness posterior N(mu_EI, sigma_EI) with EI scaled by the
/// reference stiffness, so mu_EI = 1 means "matches the reference".
struct StiffnessPosterior {
  double mu_ei = 1.0;
  double sigma_ei = 0.0;
};

struct FitConfig {
  double ei_ref = std::numeric_limits<double>::quiet_NaN();  // required
  MHConfig mh;
  JitterPolicy jitter;
  FieldSigns signs;
  std::optional<PriorSpec> prior;  // defaults to PriorSpec::defaults(problem, ei_ref)
  bool normalize_sets = false;
};

struct FitResult {
  Chain chain;
  ParamLayout layout;
  ParamVector map;
  ChainSummary summary;
  StiffnessPosterior stiffness;
  double acceptance_rate = 0.0;
  std::vector<std::string> warnings;
};

namespace detail {

inline double sample_std(const std::vector<double>& values) {
  if (values.size() < 2) return 0.0;
  const double mean =
      std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  double acc = 0.0;
  for (double v : values) acc += (v - mean) * (v - mean);
  return std::sqrt(acc / static_cast<double>(values.size() - 1));
}

inline double max_abs(const std::vector<double>& values) {
  double best = 0.0;
  for (double v : values) best = std::max(best, std::abs(v));
  return best;
}

}  // namespace detail

/// Start point heuristics: sigma_s from the deflection data spread, ell = L/2,
/// EI at the reference, and noise stds at 10% of each learnable set's spread.
inline ParamVector initial_params(const Problem& problem, double ei_ref) {
  ParamVector psi;
  psi.ell = 0.5 * problem.length;
  psi.ei = ei_ref;

  std::vector<double> deflection_values;
  double any_scale = 0.0;
  for (const ObservationSet& s : problem.observation_sets) {
    if (s.kind == QuantityKind::Deflection)
      deflection_values.insert(deflection_values.end(), s.values.begin(), s.values.end());
    any_scale = std::max(any_scale, detail::sample_std(s.values));
  }
  double sigma_s = detail::sample_std(deflection_values);
  if (!(sigma_s > 0.0)) sigma_s = any_scale;
  if (!(sigma_s > 0.0)) sigma_s = 1.0;
  psi.sigma_s = sigma_s;

  for (const ObservationSet& s : problem.observation_sets) {
    if (!s.noise.is_learnable()) continue;
    double sigma = 0.1 * detail::sample_std(s.values);
    sigma = std::max(sigma, 1e-4 * detail::max_abs(s.values));
    if (!(sigma > 0.0)) sigma = 1e-6 * std::max(sigma_s, 1.0);
    // keep the start inside the set's own prior bounds
    if (std::isfinite(s.noise.upper)) sigma = std::min(sigma, 0.99 * s.noise.upper);
    sigma = std::max(sigma, std::nextafter(s.noise.lower, std::numeric_limits<double>::max()));
    psi.noise_sigmas.push_back(sigma);
  }
  return psi;
}

/// Full pipeline: priors, start point, MH sampling, summary statistics and the
/// normalized stiffness posterior.
inline FitResult fit(const Problem& original_problem, const FitConfig& config) {
  if (!(config.ei_ref > 0.0))
    throw ConfigError("fit needs a positive reference stiffness ei_ref");
  Problem problem = original_problem;
  std::vector<std::string> warnings = problem.validate();
  if (config.normalize_sets) normalize_sets(problem);

  const ParamLayout layout = ParamLayout::from_problem(problem);
  const PriorSpec prior = config.prior ? *config.prior : PriorSpec::defaults(problem, config.ei_ref);
  prior.validate();
  if (prior.bounds.size() != layout.dim())
    throw ConfigError("prior specification does not match the dataset's parameter count");

  const ParamVector init = initial_params(problem, config.ei_ref);
  {
    const Eigen::VectorXd v = init.to_vector();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      const auto& b = prior.bounds[static_cast<std::size_t>(i)];
      if (!(v[i] >= b.lower && v[i] <= b.upper))
        throw InvalidStartError("start value " + detail::format_double(v[i]) +
                                " for parameter '" + layout.names[static_cast<std::size_t>(i)] +
                                "' violates its prior bounds [" +
                                detail::format_double(b.lower) + ", " +
                                detail::format_double(b.upper) + "]");
    }
  }

  MHConfig mh = config.mh;
  mh.param_names = layout.names;
  const LogDensity target = [&problem, &prior, &config](const Eigen::VectorXd& v) {
    return log_posterior(problem, ParamVector::from_vector(v), prior, config.jitter,
                         config.signs);
  };

  FitResult result;
  result.layout = layout;
  result.chain = run_mh(target, init.to_vector(), mh);
  result.map = ParamVector::from_vector(map_estimate(result.chain));
  result.summary = chain_summary(result.chain);
  result.acceptance_rate = result.chain.acceptance_rate;

  result.stiffness.mu_ei = result.summary.mean[2] / config.ei_ref;
  result.stiffness.sigma_ei = result.summary.std_dev[2] / config.ei_ref;

  warnings.insert(warnings.end(), result.chain.warnings.begin(), result.chain.warnings.end());
  result.warnings = std::move(warnings);
  return result;
}

}  // namespace beamgp
