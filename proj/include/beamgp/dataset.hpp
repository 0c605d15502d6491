#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "beamgp/detail/text.hpp"
#include "beamgp/errors.hpp"
#include "beamgp/kernel.hpp"

namespace beamgp {

/// Noise treatment of one observation set: a fixed standard deviation, or a
/// free parameter with uniform prior bounds. Known(0) marks a virtual set
/// (boundary condition or exactly known input); conditioning of the covariance
/// is then left to the factorization jitter.
struct NoiseSpec {
  enum class Mode { Known, Learnable };

  Mode mode = Mode::Learnable;
  double sigma = 0.0;  // Known only
  double lower = 0.0;  // Learnable prior bounds
  double upper = std::numeric_limits<double>::infinity();

  static NoiseSpec known(double sigma_value) {
    if (!(sigma_value >= 0.0)) throw DomainError("known noise sigma must be >= 0");
    NoiseSpec n;
    n.mode = Mode::Known;
    n.sigma = sigma_value;
    return n;
  }

  static NoiseSpec learnable(double lo = 0.0,
                             double hi = std::numeric_limits<double>::infinity()) {
    if (!(lo < hi)) throw DomainError("learnable noise bounds must satisfy lower < upper");
    NoiseSpec n;
    n.mode = Mode::Learnable;
    n.lower = lo;
    n.upper = hi;
    return n;
  }

  bool is_known() const { return mode == Mode::Known; }
  bool is_learnable() const { return mode == Mode::Learnable; }
  bool is_virtual() const { return is_known() && sigma == 0.0; }
};

/// One sensor group: same physical kind, shared noise treatment.
struct ObservationSet {
  QuantityKind kind = QuantityKind::Deflection;
  std::string label;
  std::vector<double> locations;
  std::vector<double> values;
  NoiseSpec noise;

  std::size_t size() const { return locations.size(); }
};

/// A known constraint (e.g. zero rotation at a fixed support), encoded as data.
struct BoundaryCondition {
  QuantityKind kind = QuantityKind::Deflection;
  double location = 0.0;
  double value = 0.0;
};

/// Converts a boundary condition into a single-point noiseless (virtual) set.
inline ObservationSet bc_to_observation(const BoundaryCondition& bc, double length) {
  if (!(bc.location >= 0.0 && bc.location <= length))
    throw DomainError("boundary condition location outside the beam [0, L]");
  ObservationSet set;
  set.kind = bc.kind;
  set.label = std::string("bc:") + kind_tag(bc.kind) + "@" + detail::format_double(bc.location);
  set.locations = {bc.location};
  set.values = {bc.value};
  set.noise = NoiseSpec::known(0.0);
  return set;
}

/// A full regression problem: beam geometry plus all observation sets.
struct Problem {
  double length = 1.0;
  std::optional<double> fiber_distance;
  std::vector<ObservationSet> observation_sets;
  std::vector<BoundaryCondition> boundary_conditions;

  /// Observation sets followed by boundary conditions expanded to virtual sets.
  /// This is the block order used for covariance assembly.
  std::vector<ObservationSet> expanded_sets() const {
    std::vector<ObservationSet> sets = observation_sets;
    sets.reserve(sets.size() + boundary_conditions.size());
    for (const BoundaryCondition& bc : boundary_conditions)
      sets.push_back(bc_to_observation(bc, length));
    return sets;
  }

  std::size_t total_observations() const {
    std::size_t n = boundary_conditions.size();
    for (const ObservationSet& s : observation_sets) n += s.size();
    return n;
  }

  /// Labels of Learnable sets, in block order; one noise parameter each.
  std::vector<std::string> learnable_labels() const {
    std::vector<std::string> labels;
    for (const ObservationSet& s : observation_sets)
      if (s.noise.is_learnable()) labels.push_back(s.label);
    return labels;
  }

  /// Throws on structural errors; returns non-fatal warnings.
  std::vector<std::string> validate() const {
    if (!(length > 0.0)) throw DomainError("beam length must be positive");
    if (fiber_distance && !(*fiber_distance > 0.0))
      throw DomainError("fiber distance c must be positive");
    bool has_real_set = false;
    for (const ObservationSet& s : observation_sets) {
      if (s.locations.empty() || s.locations.size() != s.values.size())
        throw DomainError("observation set '" + s.label +
                          "' needs equal, nonzero numbers of locations and values");
      if (s.label.find(',') != std::string::npos || s.label.find('\n') != std::string::npos)
        throw DomainError("observation set label must not contain ',' or newline");
      for (double x : s.locations)
        if (!(x >= 0.0 && x <= length))
          throw DomainError("observation location outside the beam [0, L] in set '" +
                            s.label + "'");
      has_real_set = true;
    }
    if (!has_real_set) throw DomainError("problem needs at least one observation set");
    for (const BoundaryCondition& bc : boundary_conditions)
      if (!(bc.location >= 0.0 && bc.location <= length))
        throw DomainError("boundary condition location outside the beam [0, L]");

    std::vector<std::string> warnings;
    const std::size_t free_params = 3 + learnable_labels().size();
    if (total_observations() < free_params)
      warnings.push_back("fewer observations (" + std::to_string(total_observations()) +
                         ") than free parameters (" + std::to_string(free_params) + ")");
    return warnings;
  }
};

/// Divides each set's values by its max absolute value. Returns the applied
/// scales, aligned with the sets. Off by default at fit time; cross-kind
/// physical coupling assumes raw SI units.
inline std::vector<double> normalize_sets(Problem& problem) {
  std::vector<double> scales;
  scales.reserve(problem.observation_sets.size());
  for (ObservationSet& s : problem.observation_sets) {
    double maxabs = 0.0;
    for (double v : s.values) maxabs = std::max(maxabs, std::abs(v));
    const double scale = maxabs > 0.0 ? maxabs : 1.0;
    for (double& v : s.values) v /= scale;
    if (s.noise.is_known()) s.noise.sigma /= scale;
    scales.push_back(scale);
  }
  return scales;
}

}  // namespace beamgp
