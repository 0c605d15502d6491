#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "beamgp/detail/text.hpp"
#include "beamgp/errors.hpp"
#include "beamgp/rng.hpp"

namespace beamgp {

/// Space the random walk runs in. LogPositive walks log(psi) with the Jacobian
/// folded into the acceptance ratio, so the chain still targets the density
/// given over psi itself.
enum class ProposalSpace { LogPositive, Identity };

struct AdaptConfig {
  bool enabled = true;
  double target_acceptance = 0.30;
  int window = 200;
};

struct MHConfig {
  long n_steps = 20000;
  long burn_in = 5000;
  long thin = 10;
  double proposal_scale = 0.05;         // used when proposal_scales is empty
  std::vector<double> proposal_scales;  // per-coordinate override
  AdaptConfig adapt;
  std::uint64_t seed = 0;
  ProposalSpace space = ProposalSpace::LogPositive;
  std::vector<std::string> param_names;  // optional, carried into the chain

  void validate(std::size_t dim) const {
    if (n_steps <= 0 || burn_in < 0 || burn_in >= n_steps)
      throw ContractViolation("need 0 <= burn_in < n_steps");
    if (thin < 1) throw ContractViolation("thin must be >= 1");
    if (!(proposal_scale > 0.0)) throw ContractViolation("proposal scale must be positive");
    if (!proposal_scales.empty() && proposal_scales.size() != dim)
      throw ContractViolation("proposal_scales size does not match the parameter count");
    for (double s : proposal_scales)
      if (!(s > 0.0)) throw ContractViolation("proposal scales must be positive");
    if (adapt.enabled &&
        !(adapt.target_acceptance > 0.0 && adapt.target_acceptance < 1.0 && adapt.window > 0))
      throw ContractViolation("adaptation needs 0 < target acceptance < 1 and window > 0");
  }
};

/// Retained samples (in psi space), their log target values, and diagnostics.
struct Chain {
  std::vector<Eigen::VectorXd> samples;
  std::vector<double> log_posterior_trace;
  double acceptance_rate = 0.0;
  std::size_t map_index = 0;
  std::vector<std::string> param_names;
  std::vector<std::string> warnings;

  std::size_t size() const { return samples.size(); }
  std::size_t dim() const { return samples.empty() ? 0 : static_cast<std::size_t>(samples[0].size()); }
};

using LogDensity = std::function<double(const Eigen::VectorXd&)>;

/// Gaussian random-walk Metropolis-Hastings. `target` is the log density over
/// psi; NumericalError from the target counts as -infinity. Proposal scales
/// adapt toward the target acceptance during burn-in only, then freeze, so the
/// retained chain is Markovian. Fully reproducible from config.seed.
inline Chain run_mh(const LogDensity& target, const Eigen::VectorXd& init,
                    const MHConfig& config) {
  const auto dim = static_cast<std::size_t>(init.size());
  config.validate(dim);
  const bool log_space = config.space == ProposalSpace::LogPositive;
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();

  const auto eval = [&](const Eigen::VectorXd& psi) -> double {
    double value;
    try {
      value = target(psi);
    } catch (const NumericalError&) {
      return kNegInf;
    }
    return std::isnan(value) ? kNegInf : value;
  };

  if (log_space)
    for (Eigen::Index i = 0; i < init.size(); ++i)
      if (!(init[i] > 0.0))
        throw InvalidStartError("log-space sampling needs a strictly positive start point");

  Eigen::VectorXd state = log_space ? init.array().log().matrix().eval() : init;
  Eigen::VectorXd psi = init;
  double target_value = eval(psi);                                  // log target over psi
  double density = log_space ? target_value + state.sum() : target_value;  // walked density
  if (!std::isfinite(target_value))
    throw InvalidStartError("log posterior is not finite at the start point");

  Eigen::VectorXd scales(init.size());
  if (config.proposal_scales.empty())
    scales.setConstant(config.proposal_scale);
  else
    for (std::size_t i = 0; i < dim; ++i)
      scales[static_cast<Eigen::Index>(i)] = config.proposal_scales[i];

  RngEngine rng(config.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  Chain chain;
  chain.param_names = config.param_names;
  const std::size_t retained =
      static_cast<std::size_t>((config.n_steps - config.burn_in) / config.thin);
  chain.samples.reserve(retained);
  chain.log_posterior_trace.reserve(retained);

  long accepted_post = 0;
  long accepted_window = 0;
  long window_counter = 0;
  Eigen::VectorXd proposal(init.size());

  for (long step = 1; step <= config.n_steps; ++step) {
    for (Eigen::Index i = 0; i < proposal.size(); ++i)
      proposal[i] = state[i] + scales[i] * normal(rng);

    const Eigen::VectorXd cand_psi =
        log_space ? proposal.array().exp().matrix().eval() : proposal;
    const double cand_target = eval(cand_psi);
    const double cand_density = log_space ? cand_target + proposal.sum() : cand_target;

    const double log_u = std::log(uniform(rng));
    if (cand_density - density > log_u) {
      state = proposal;
      psi = cand_psi;
      target_value = cand_target;
      density = cand_density;
      if (step > config.burn_in) ++accepted_post;
      ++accepted_window;
    }

    // Robbins-Monro global rescaling toward the target acceptance, burn-in only.
    if (config.adapt.enabled && step <= config.burn_in && step % config.adapt.window == 0) {
      ++window_counter;
      const double rate =
          static_cast<double>(accepted_window) / static_cast<double>(config.adapt.window);
      const double gamma = 1.0 / std::sqrt(static_cast<double>(window_counter));
      double factor = std::exp(gamma * (rate - config.adapt.target_acceptance));
      factor = std::min(std::max(factor, 0.1), 10.0);
      scales *= factor;
      accepted_window = 0;
    }
    if (step == config.burn_in) accepted_window = 0;

    if (step > config.burn_in && (step - config.burn_in) % config.thin == 0) {
      chain.samples.push_back(psi);
      chain.log_posterior_trace.push_back(target_value);
    }
  }

  chain.acceptance_rate =
      static_cast<double>(accepted_post) / static_cast<double>(config.n_steps - config.burn_in);
  if (accepted_post == 0)
    chain.warnings.push_back("no proposals accepted after burn-in; check proposal scales");

  chain.map_index = 0;
  for (std::size_t i = 1; i < chain.log_posterior_trace.size(); ++i)
    if (chain.log_posterior_trace[i] > chain.log_posterior_trace[chain.map_index])
      chain.map_index = i;
  return chain;
}

/// The retained sample with the highest log target value.
inline const Eigen::VectorXd& map_estimate(const Chain& chain) {
  if (chain.samples.empty()) throw ContractViolation("map_estimate needs a nonempty chain");
  return chain.samples[chain.map_index];
}

struct ChainSummary {
  Eigen::VectorXd mean;
  Eigen::VectorXd std_dev;
  Eigen::MatrixXd correlation;
  std::vector<bool> degenerate;  // per parameter: true when std == 0
};

/// Sample mean, std and pairwise correlations over the retained samples.
/// Correlations involving a constant coordinate are reported as 0 and flagged.
inline ChainSummary chain_summary(const Chain& chain) {
  if (chain.size() < 2) throw ContractViolation("chain_summary needs at least 2 samples");
  const auto n = static_cast<Eigen::Index>(chain.size());
  const auto d = static_cast<Eigen::Index>(chain.dim());

  Eigen::MatrixXd data(n, d);
  for (Eigen::Index i = 0; i < n; ++i) data.row(i) = chain.samples[static_cast<std::size_t>(i)];

  ChainSummary summary;
  summary.mean = data.colwise().mean();
  Eigen::MatrixXd centered = data.rowwise() - summary.mean.transpose();
  Eigen::MatrixXd covariance =
      centered.transpose() * centered / static_cast<double>(n - 1);
  summary.std_dev = covariance.diagonal().array().sqrt();
  summary.degenerate.assign(static_cast<std::size_t>(d), false);
  summary.correlation = Eigen::MatrixXd::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    if (summary.std_dev[i] == 0.0) summary.degenerate[static_cast<std::size_t>(i)] = true;
  }
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      if (summary.std_dev[i] == 0.0 || summary.std_dev[j] == 0.0) continue;
      summary.correlation(i, j) = covariance(i, j) / (summary.std_dev[i] * summary.std_dev[j]);
    }
    if (summary.std_dev[i] > 0.0) summary.correlation(i, i) = 1.0;
  }
  return summary;
}

/// Chain CSV: one row per retained sample, parameter columns then log_posterior.
inline void write_chain_csv_stream(const Chain& chain, std::ostream& out) {
  for (std::size_t i = 0; i < chain.dim(); ++i) {
    const std::string name =
        i < chain.param_names.size() ? chain.param_names[i] : "p" + std::to_string(i);
    out << name << ',';
  }
  out << "log_posterior\n";
  for (std::size_t i = 0; i < chain.size(); ++i) {
    for (Eigen::Index j = 0; j < chain.samples[i].size(); ++j)
      out << detail::format_double(chain.samples[i][j]) << ',';
    out << detail::format_double(chain.log_posterior_trace[i]) << '\n';
  }
}

inline void write_chain_csv(const Chain& chain, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write chain file: " + path);
  write_chain_csv_stream(chain, out);
  if (!out) throw IoError("failed while writing chain file: " + path);
}

inline Chain read_chain_csv_stream(std::istream& in, const std::string& origin) {
  Chain chain;
  std::string line;
  long line_no = 0;
  if (!std::getline(in, line)) throw ParseError(origin + ": empty chain file");
  ++line_no;
  std::vector<std::string> header = detail::split(line, ',');
  if (header.empty() || detail::trim(header.back()) != "log_posterior")
    throw ParseError(origin + ": last column must be log_posterior", line_no);
  for (std::size_t i = 0; i + 1 < header.size(); ++i)
    chain.param_names.push_back(detail::trim(header[i]));
  const std::size_t dim = chain.param_names.size();

  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split(line, ',');
    if (fields.size() != dim + 1)
      throw ParseError(origin + ": expected " + std::to_string(dim + 1) + " fields", line_no);
    Eigen::VectorXd sample(static_cast<Eigen::Index>(dim));
    for (std::size_t j = 0; j < dim; ++j) {
      const auto v = detail::try_parse_double(fields[j]);
      if (!v) throw ParseError(origin + ": bad numeric field", line_no);
      sample[static_cast<Eigen::Index>(j)] = *v;
    }
    const auto lp = detail::try_parse_double(fields[dim]);
    if (!lp) throw ParseError(origin + ": bad log_posterior field", line_no);
    chain.samples.push_back(std::move(sample));
    chain.log_posterior_trace.push_back(*lp);
  }
  if (chain.samples.empty()) throw ParseError(origin + ": chain file has no samples");
  chain.acceptance_rate = std::numeric_limits<double>::quiet_NaN();
  chain.map_index = 0;
  for (std::size_t i = 1; i < chain.log_posterior_trace.size(); ++i)
    if (chain.log_posterior_trace[i] > chain.log_posterior_trace[chain.map_index])
      chain.map_index = i;
  return chain;
}

inline Chain read_chain_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open chain file: " + path);
  return read_chain_csv_stream(in, path);
}

}  // namespace beamgp
