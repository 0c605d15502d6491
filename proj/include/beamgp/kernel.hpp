#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>

#include "beamgp/errors.hpp"

namespace beamgp {

/// Squared-exponential kernel hyperparameters: amplitude std (deflection units)
/// and length scale (m).
struct KernelParams {
  double sigma_s = 1.0;
  double ell = 1.0;

  void validate() const {
    if (!(sigma_s > 0.0) || !(ell > 0.0))
      throw DomainError("kernel parameters must be strictly positive");
  }
};

/// The six physical fields of the Euler-Bernoulli beam model.
enum class QuantityKind { Deflection, Rotation, Strain, Moment, Shear, Load };

inline constexpr int kQuantityCount = 6;

inline constexpr std::array<QuantityKind, kQuantityCount> kAllQuantities = {
    QuantityKind::Deflection, QuantityKind::Rotation, QuantityKind::Strain,
    QuantityKind::Moment,     QuantityKind::Shear,    QuantityKind::Load};

inline const char* kind_tag(QuantityKind kind) {
  switch (kind) {
    case QuantityKind::Deflection: return "u";
    case QuantityKind::Rotation: return "r";
    case QuantityKind::Strain: return "eps";
    case QuantityKind::Moment: return "m";
    case QuantityKind::Shear: return "v";
    case QuantityKind::Load: return "q";
  }
  throw ContractViolation("unknown quantity kind");
}

inline std::optional<QuantityKind> parse_kind_tag(const std::string& tag) {
  for (QuantityKind k : kAllQuantities)
    if (tag == kind_tag(k)) return k;
  return std::nullopt;
}

/// Per-kind orientation signs (+1/-1). Defaults give r = u', eps = -c u'',
/// m = -EI u'', v = -EI u''', q = +EI u'''', so that EI u'''' = q holds and
/// the cantilever free-end conditions m(L) = v(L) = 0 are preserved.
struct FieldSigns {
  std::array<double, kQuantityCount> sign = {+1.0, +1.0, -1.0, -1.0, -1.0, +1.0};

  double operator()(QuantityKind kind) const { return sign[static_cast<int>(kind)]; }
};

/// Linear differential operator mapping deflection to a physical field:
/// field = coefficient * d^order u / dx^order.
struct FieldOperator {
  int derivative_order = 0;
  double coefficient = 1.0;
};

/// Builds the operator for `kind`. `ei` is required for Moment/Shear/Load,
/// `fiber_distance` for Strain.
inline FieldOperator field_operator(QuantityKind kind, double ei,
                                    std::optional<double> fiber_distance = std::nullopt,
                                    const FieldSigns& signs = FieldSigns{}) {
  const double s = signs(kind);
  switch (kind) {
    case QuantityKind::Deflection: return {0, s};
    case QuantityKind::Rotation: return {1, s};
    case QuantityKind::Strain:
      if (!fiber_distance || !(*fiber_distance > 0.0))
        throw ConfigError("strain requires a positive fiber distance c");
      return {2, s * (*fiber_distance)};
    case QuantityKind::Moment:
      if (!(ei > 0.0)) throw DomainError("bending stiffness EI must be positive");
      return {2, s * ei};
    case QuantityKind::Shear:
      if (!(ei > 0.0)) throw DomainError("bending stiffness EI must be positive");
      return {3, s * ei};
    case QuantityKind::Load:
      if (!(ei > 0.0)) throw DomainError("bending stiffness EI must be positive");
      return {4, s * ei};
  }
  throw ContractViolation("unknown quantity kind");
}

namespace detail {

// Probabilists' Hermite polynomials He_k, integer coefficients up to k = 8.
// d^k/dt^k exp(-t^2/2) = (-1)^k He_k(t) exp(-t^2/2).
inline constexpr int kMaxHermiteOrder = 8;
inline constexpr std::array<std::array<std::int64_t, 9>, 9> kHermiteCoeffs = {{
    {1, 0, 0, 0, 0, 0, 0, 0, 0},
    {0, 1, 0, 0, 0, 0, 0, 0, 0},
    {-1, 0, 1, 0, 0, 0, 0, 0, 0},
    {0, -3, 0, 1, 0, 0, 0, 0, 0},
    {3, 0, -6, 0, 1, 0, 0, 0, 0},
    {0, 15, 0, -10, 0, 1, 0, 0, 0},
    {-15, 0, 45, 0, -15, 0, 1, 0, 0},
    {0, -105, 0, 105, 0, -21, 0, 1, 0},
    {105, 0, -420, 0, 210, 0, -28, 0, 1},
}};

inline double hermite_eval(int order, double t) {
  const auto& c = kHermiteCoeffs[static_cast<std::size_t>(order)];
  double acc = 0.0;
  for (int i = order; i >= 0; --i) acc = acc * t + static_cast<double>(c[static_cast<std::size_t>(i)]);
  return acc;
}

// d^{m+n} k_uu / dx^m dx'^n, no argument validation. Evaluated in the scaled
// variable tau = (x - x')/ell: sigma^2 (-1)^m ell^{-(m+n)} He_{m+n}(tau) e^{-tau^2/2}.
inline double se_deriv_core(const KernelParams& p, int m, int n, double x, double x_prime) {
  const double inv_ell = 1.0 / p.ell;
  const double tau = (x - x_prime) * inv_ell;
  const int total = m + n;
  double scale = p.sigma_s * p.sigma_s;
  for (int i = 0; i < total; ++i) scale *= inv_ell;
  const double sign = (m % 2 == 0) ? 1.0 : -1.0;
  return sign * scale * hermite_eval(total, tau) * std::exp(-0.5 * tau * tau);
}

inline double apply_operators(const KernelParams& p, const FieldOperator& a,
                              const FieldOperator& b, double x, double x_prime) {
  return a.coefficient * b.coefficient *
         se_deriv_core(p, a.derivative_order, b.derivative_order, x, x_prime);
}

}  // namespace detail

/// Mixed partial derivative d^{m+n} k_uu / dx^m dx'^n of the squared-exponential
/// kernel, closed form (no numerical differentiation).
inline double se_kernel_deriv(const KernelParams& params, int m, int n, double x,
                              double x_prime) {
  params.validate();
  if (m < 0 || m > 4 || n < 0 || n > 4)
    throw ContractViolation("derivative orders must lie in [0, 4]");
  if (!std::isfinite(x) || !std::isfinite(x_prime) || !std::isfinite(params.sigma_s) ||
      !std::isfinite(params.ell))
    throw ContractViolation("non-finite kernel input");
  return detail::se_deriv_core(params, m, n, x, x_prime);
}

/// Cross-covariance between fields `kind_a` (acting on the x argument) and
/// `kind_b` (acting on the x' argument), both derived from k_uu.
inline double cross_kernel(const KernelParams& params, double ei,
                           std::optional<double> fiber_distance, QuantityKind kind_a,
                           QuantityKind kind_b, double x, double x_prime,
                           const FieldSigns& signs = FieldSigns{}) {
  const FieldOperator op_a = field_operator(kind_a, ei, fiber_distance, signs);
  const FieldOperator op_b = field_operator(kind_b, ei, fiber_distance, signs);
  // Route through se_kernel_deriv for its argument validation.
  return op_a.coefficient * op_b.coefficient *
         se_kernel_deriv(params, op_a.derivative_order, op_b.derivative_order, x, x_prime);
}

}  // namespace beamgp
