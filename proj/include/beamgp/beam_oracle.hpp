#pragma once

#include <Eigen/Core>
#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "beamgp/dataset.hpp"
#include "beamgp/errors.hpp"
#include "beamgp/kernel.hpp"
#include "beamgp/rng.hpp"

namespace beamgp {

enum class SupportType { CantileverLeft, SimplySupported };

/// Ground-truth beam description: geometry, per-element stiffness, support,
/// uniform load.
struct BeamSpec {
  double length = 1.0;
  std::vector<double> ei_elements = {1.0};
  SupportType support = SupportType::CantileverLeft;
  double load_q = 1.0;
  std::optional<double> fiber_distance;

  std::size_t n_elements() const { return ei_elements.size(); }

  std::optional<double> uniform_ei() const {
    if (ei_elements.empty()) return std::nullopt;
    for (double ei : ei_elements)
      if (ei != ei_elements.front()) return std::nullopt;
    return ei_elements.front();
  }

  void validate() const {
    if (!(length > 0.0)) throw DomainError("beam length must be positive");
    if (ei_elements.empty()) throw DomainError("beam needs at least one element");
    for (double ei : ei_elements)
      if (!(ei > 0.0)) throw DomainError("element stiffness must be positive");
  }

  static BeamSpec uniform(double length, double ei, double q, std::size_t n_elements = 20,
                          SupportType support = SupportType::CantileverLeft) {
    BeamSpec spec;
    spec.length = length;
    spec.ei_elements.assign(n_elements, ei);
    spec.support = support;
    spec.load_q = q;
    return spec;
  }

  /// Copy with element `element` (1-based) reduced by `reduction` in [0, 1).
  BeamSpec with_damage(std::size_t element, double reduction) const {
    if (element < 1 || element > n_elements())
      throw ContractViolation("damage element index out of range");
    if (!(reduction >= 0.0 && reduction < 1.0))
      throw ContractViolation("stiffness reduction must lie in [0, 1)");
    BeamSpec damaged = *this;
    damaged.ei_elements[element - 1] *= 1.0 - reduction;
    return damaged;
  }
};

namespace detail {

/// field value from deflection derivatives (u, u', u'', u''', u'''') under the
/// configured sign conventions.
inline double field_from_derivs(QuantityKind kind, const std::array<double, 5>& du, double ei,
                                std::optional<double> c, const FieldSigns& signs) {
  switch (kind) {
    case QuantityKind::Deflection: return signs(kind) * du[0];
    case QuantityKind::Rotation: return signs(kind) * du[1];
    case QuantityKind::Strain:
      if (!c || !(*c > 0.0)) throw ConfigError("strain requires a positive fiber distance c");
      return signs(kind) * (*c) * du[2];
    case QuantityKind::Moment: return signs(kind) * ei * du[2];
    case QuantityKind::Shear: return signs(kind) * ei * du[3];
    case QuantityKind::Load: return signs(kind) * ei * du[4];
  }
  throw ContractViolation("unknown quantity kind");
}

}  // namespace detail

/// Closed-form uniform-load cantilever response,
/// u(x) = q x^2 (x^2 - 4Lx + 6L^2) / (24 EI), and its derived fields.
inline double cantilever_analytic(double q, double length, double ei, QuantityKind kind,
                                  double x, std::optional<double> fiber_distance = std::nullopt,
                                  const FieldSigns& signs = FieldSigns{}) {
  if (!(length > 0.0) || !(ei > 0.0)) throw DomainError("need positive length and EI");
  if (!(x >= 0.0 && x <= length)) throw DomainError("position outside the beam [0, L]");
  const double L = length;
  const std::array<double, 5> du = {
      q * x * x * (x * x - 4.0 * L * x + 6.0 * L * L) / (24.0 * ei),
      q * x * (4.0 * x * x - 12.0 * L * x + 12.0 * L * L) / (24.0 * ei),
      q * (L - x) * (L - x) / (2.0 * ei),
      q * (x - L) / ei,
      q / ei,
  };
  return detail::field_from_derivs(kind, du, ei, fiber_distance, signs);
}

/// Hermite-cubic finite-element solution with evaluators for the latent fields.
class FESolution {
 public:
  FESolution(BeamSpec spec, Eigen::VectorXd dofs) : spec_(std::move(spec)), dofs_(std::move(dofs)) {}

  const BeamSpec& spec() const { return spec_; }

  double node_position(std::size_t node) const {
    return spec_.length * static_cast<double>(node) / static_cast<double>(spec_.n_elements());
  }
  double nodal_deflection(std::size_t node) const {
    return dofs_[static_cast<Eigen::Index>(2 * node)];
  }
  double nodal_rotation(std::size_t node) const {
    return dofs_[static_cast<Eigen::Index>(2 * node + 1)];
  }

  /// Field value at x by Hermite interpolation within the containing element.
  double value(QuantityKind kind, double x,
               const FieldSigns& signs = FieldSigns{}) const {
    if (!(x >= 0.0 && x <= spec_.length)) throw DomainError("position outside the beam [0, L]");
    if (kind == QuantityKind::Load) return signs(kind) >= 0 ? spec_.load_q : -spec_.load_q;

    const std::size_t n = spec_.n_elements();
    const double h = spec_.length / static_cast<double>(n);
    std::size_t e = std::min(static_cast<std::size_t>(x / h), n - 1);
    const double xi = (x - static_cast<double>(e) * h) / h;

    const auto base = static_cast<Eigen::Index>(2 * e);
    const double u1 = dofs_[base], t1 = dofs_[base + 1];
    const double u2 = dofs_[base + 2], t2 = dofs_[base + 3];

    const double xi2 = xi * xi, xi3 = xi2 * xi;
    std::array<double, 5> du{};
    du[0] = (1.0 - 3.0 * xi2 + 2.0 * xi3) * u1 + h * (xi - 2.0 * xi2 + xi3) * t1 +
            (3.0 * xi2 - 2.0 * xi3) * u2 + h * (xi3 - xi2) * t2;
    du[1] = ((-6.0 * xi + 6.0 * xi2) * u1 + h * (1.0 - 4.0 * xi + 3.0 * xi2) * t1 +
             (6.0 * xi - 6.0 * xi2) * u2 + h * (3.0 * xi2 - 2.0 * xi) * t2) /
            h;
    du[2] = ((-6.0 + 12.0 * xi) * u1 + h * (-4.0 + 6.0 * xi) * t1 + (6.0 - 12.0 * xi) * u2 +
             h * (6.0 * xi - 2.0) * t2) /
            (h * h);
    du[3] = (12.0 * u1 + 6.0 * h * t1 - 12.0 * u2 + 6.0 * h * t2) / (h * h * h);
    du[4] = 0.0;  // cubic interpolant; Load is handled above
    return detail::field_from_derivs(kind, du, spec_.ei_elements[e], spec_.fiber_distance,
                                     signs);
  }

 private:
  BeamSpec spec_;
  Eigen::VectorXd dofs_;  // [u_0, theta_0, u_1, theta_1, ...]
};

/// Assembles and solves the two-node Hermite beam model. Nodal values are
/// exact for uniform loading with element-wise constant EI.
inline FESolution fe_solve(const BeamSpec& spec) {
  spec.validate();
  const std::size_t n = spec.n_elements();
  const double h = spec.length / static_cast<double>(n);
  const auto n_dofs = static_cast<Eigen::Index>(2 * (n + 1));

  Eigen::MatrixXd stiffness = Eigen::MatrixXd::Zero(n_dofs, n_dofs);
  Eigen::VectorXd load = Eigen::VectorXd::Zero(n_dofs);
  const double q = spec.load_q;
  for (std::size_t e = 0; e < n; ++e) {
    const double k0 = spec.ei_elements[e] / (h * h * h);
    const double ke[4][4] = {
        {12.0, 6.0 * h, -12.0, 6.0 * h},
        {6.0 * h, 4.0 * h * h, -6.0 * h, 2.0 * h * h},
        {-12.0, -6.0 * h, 12.0, -6.0 * h},
        {6.0 * h, 2.0 * h * h, -6.0 * h, 4.0 * h * h},
    };
    const double fe[4] = {q * h / 2.0, q * h * h / 12.0, q * h / 2.0, -q * h * h / 12.0};
    const auto base = static_cast<Eigen::Index>(2 * e);
    for (int i = 0; i < 4; ++i) {
      load[base + i] += fe[i];
      for (int j = 0; j < 4; ++j) stiffness(base + i, base + j) += k0 * ke[i][j];
    }
  }

  std::vector<Eigen::Index> fixed;
  if (spec.support == SupportType::CantileverLeft) {
    fixed = {0, 1};
  } else {
    fixed = {0, static_cast<Eigen::Index>(2 * n)};
  }
  std::vector<Eigen::Index> free_dofs;
  for (Eigen::Index i = 0; i < n_dofs; ++i)
    if (std::find(fixed.begin(), fixed.end(), i) == fixed.end()) free_dofs.push_back(i);

  const auto nf = static_cast<Eigen::Index>(free_dofs.size());
  Eigen::MatrixXd k_ff(nf, nf);
  Eigen::VectorXd f_f(nf);
  for (Eigen::Index i = 0; i < nf; ++i) {
    f_f[i] = load[free_dofs[static_cast<std::size_t>(i)]];
    for (Eigen::Index j = 0; j < nf; ++j)
      k_ff(i, j) = stiffness(free_dofs[static_cast<std::size_t>(i)],
                             free_dofs[static_cast<std::size_t>(j)]);
  }

  Eigen::FullPivLU<Eigen::MatrixXd> lu(k_ff);
  if (!lu.isInvertible())
    throw NumericalError("singular global stiffness matrix (insufficient supports)");
  const Eigen::VectorXd d_f = lu.solve(f_f);

  Eigen::VectorXd dofs = Eigen::VectorXd::Zero(n_dofs);
  for (Eigen::Index i = 0; i < nf; ++i) dofs[free_dofs[static_cast<std::size_t>(i)]] = d_f[i];
  return FESolution(spec, std::move(dofs));
}

enum class TruthKind { Analytic, FiniteElement };

/// Uniform wrapper over the two ground-truth models.
class TruthModel {
 public:
  TruthModel(const BeamSpec& spec, TruthKind kind, const FieldSigns& signs = FieldSigns{})
      : spec_(spec), kind_(kind), signs_(signs) {
    spec.validate();
    if (kind == TruthKind::Analytic) {
      if (spec.support != SupportType::CantileverLeft || !spec.uniform_ei())
        throw ConfigError("analytic truth requires a uniform-EI cantilever");
    } else {
      fe_ = fe_solve(spec);
    }
  }

  double value(QuantityKind kind, double x) const {
    if (kind_ == TruthKind::Analytic)
      return cantilever_analytic(spec_.load_q, spec_.length, *spec_.uniform_ei(), kind, x,
                                 spec_.fiber_distance, signs_);
    return fe_->value(kind, x, signs_);
  }

  /// Max absolute response of a field over the beam (dense grid scan).
  double max_abs(QuantityKind kind, int grid = 2001) const {
    double best = 0.0;
    for (int i = 0; i < grid; ++i) {
      const double x = spec_.length * static_cast<double>(i) / static_cast<double>(grid - 1);
      best = std::max(best, std::abs(value(kind, x)));
    }
    return best;
  }

  const BeamSpec& spec() const { return spec_; }

 private:
  BeamSpec spec_;
  TruthKind kind_;
  FieldSigns signs_;
  std::optional<FESolution> fe_;
};

/// Boundary conditions implied by the support type.
inline std::vector<BoundaryCondition> support_bcs(const BeamSpec& spec) {
  if (spec.support == SupportType::CantileverLeft)
    return {{QuantityKind::Deflection, 0.0, 0.0},
            {QuantityKind::Rotation, 0.0, 0.0},
            {QuantityKind::Moment, spec.length, 0.0},
            {QuantityKind::Shear, spec.length, 0.0}};
  return {{QuantityKind::Deflection, 0.0, 0.0},
          {QuantityKind::Deflection, spec.length, 0.0},
          {QuantityKind::Moment, 0.0, 0.0},
          {QuantityKind::Moment, spec.length, 0.0}};
}

/// One sensor group to synthesize: where it measures and, optionally, its own
/// SNR / repeat count / label overriding the plan-wide defaults.
struct PlanEntry {
  QuantityKind kind = QuantityKind::Deflection;
  std::vector<double> positions;
  std::optional<double> snr;
  std::optional<int> points_per_sensor;
  std::string label;
};

/// Synthetic measurement campaign. SNR may be infinite (exact, virtual sets).
struct SensorPlan {
  std::vector<PlanEntry> entries;
  int points_per_sensor = 5;
  double snr = 10.0;
  std::uint64_t seed = 0;

  void validate(double length) const {
    if (entries.empty()) throw ConfigError("sensor plan needs at least one entry");
    for (const PlanEntry& e : entries) {
      if (e.positions.empty()) throw ConfigError("sensor plan entry needs positions");
      for (double x : e.positions)
        if (!(x >= 0.0 && x <= length))
          throw DomainError("sensor position outside the beam [0, L]");
      const int ndp = e.points_per_sensor.value_or(points_per_sensor);
      if (ndp < 1) throw ConfigError("points per sensor must be >= 1");
      const double s = e.snr.value_or(snr);
      if (!(s > 0.0)) throw ConfigError("SNR must be positive (may be inf)");
    }
  }
};

/// The paper-style benchmark campaign: deflection sensors with N_dp repeats at
/// the given SNR, plus the known load as a noiseless set on an even grid.
inline SensorPlan benchmark_plan(double length, const std::vector<double>& sensor_positions,
                                 int points_per_sensor, double snr, int load_points = 9) {
  SensorPlan plan;
  plan.points_per_sensor = points_per_sensor;
  plan.snr = snr;
  PlanEntry deflection;
  deflection.kind = QuantityKind::Deflection;
  deflection.positions = sensor_positions;
  deflection.label = "u_sensors";
  plan.entries.push_back(std::move(deflection));
  if (load_points > 0) {
    PlanEntry load;
    load.kind = QuantityKind::Load;
    for (int i = 0; i < load_points; ++i)
      load.positions.push_back(load_points == 1
                                   ? 0.5 * length
                                   : length * static_cast<double>(i) /
                                         static_cast<double>(load_points - 1));
    load.snr = std::numeric_limits<double>::infinity();
    load.points_per_sensor = 1;
    load.label = "q_load";
    plan.entries.push_back(std::move(load));
  }
  return plan;
}

/// Default sensor layout: 4 equally spaced stations excluding the fixed end.
inline std::vector<double> default_sensor_positions(double length) {
  return {0.25 * length, 0.5 * length, 0.75 * length, length};
}

/// Draws a noisy dataset around the truth model. Each sensor contributes N_dp
/// independent Gaussian draws at its own position, with std = max-abs response
/// of that kind over the beam divided by the SNR (Gaussian SNR noise model).
/// Infinite SNR yields exact values in a noiseless (virtual) set; finite-SNR
/// sets are Learnable. The support's boundary conditions are attached.
inline Problem synth_dataset(const BeamSpec& spec, const SensorPlan& plan, TruthKind truth_kind,
                             const FieldSigns& signs = FieldSigns{}) {
  spec.validate();
  plan.validate(spec.length);
  const TruthModel truth(spec, truth_kind, signs);

  Problem problem;
  problem.length = spec.length;
  problem.fiber_distance = spec.fiber_distance;
  problem.boundary_conditions = support_bcs(spec);

  RngEngine rng(plan.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  std::size_t entry_index = 0;
  for (const PlanEntry& entry : plan.entries) {
    const double entry_snr = entry.snr.value_or(plan.snr);
    const int ndp = entry.points_per_sensor.value_or(plan.points_per_sensor);
    const bool exact = std::isinf(entry_snr);
    const double sigma = exact ? 0.0 : truth.max_abs(entry.kind) / entry_snr;

    ObservationSet set;
    set.kind = entry.kind;
    set.label = entry.label.empty() ? std::string(kind_tag(entry.kind)) + "_sensors_" +
                                          std::to_string(entry_index)
                                    : entry.label;
    set.noise = exact ? NoiseSpec::known(0.0) : NoiseSpec::learnable();
    for (double x : entry.positions) {
      const double clean = truth.value(entry.kind, x);
      for (int k = 0; k < ndp; ++k) {
        set.locations.push_back(x);
        set.values.push_back(exact ? clean : clean + sigma * normal(rng));
      }
    }
    problem.observation_sets.push_back(std::move(set));
    ++entry_index;
  }
  problem.validate();
  return problem;
}

/// Dense ground-truth table for later error scoring.
struct TruthRow {
  QuantityKind kind;
  double x;
  double value;
};

inline std::vector<TruthRow> truth_table(const BeamSpec& spec, TruthKind truth_kind,
                                         const std::vector<QuantityKind>& kinds, int grid_n,
                                         const FieldSigns& signs = FieldSigns{}) {
  if (grid_n < 2) throw ContractViolation("truth grid needs at least 2 points");
  const TruthModel truth(spec, truth_kind, signs);
  std::vector<TruthRow> rows;
  rows.reserve(kinds.size() * static_cast<std::size_t>(grid_n));
  for (QuantityKind kind : kinds)
    for (int i = 0; i < grid_n; ++i) {
      const double x = spec.length * static_cast<double>(i) / static_cast<double>(grid_n - 1);
      rows.push_back({kind, x, truth.value(kind, x)});
    }
  return rows;
}

}  // namespace beamgp
