#pragma once

#include <cmath>
#include <stdexcept>

#include "tempoloop/errors.hpp"

namespace tempoloop {

// Conversion between the macro clock (days) and rate units (1/s). The model
// mixes both, so every conversion goes through this one constant.
inline constexpr double kSecondsPerDay = 86400.0;

// Reference wall shear stress of the default parameter set. Calibrated once
// against the serial reference run so that the foam cell concentration ends
// at 0.33 after 300 days; stronger growth regimes leave no margin on the
// periodicity and parareal convergence guarantees. Regenerate with
// tests/make_golden if the surrogate flow model changes.
inline constexpr double kDefaultSigma0 = 0.43966042;

// Parameters of the foam cell growth law.
struct GrowthParams {
  double alpha = 1e-7;             // growth rate scale, 1/s
  double sigma0 = kDefaultSigma0;  // reference wall shear stress

  void validate() const {
    if (!(alpha > 0.0)) throw ConfigError("GrowthParams: alpha must be > 0");
    if (!(sigma0 > 0.0)) throw ConfigError("GrowthParams: sigma0 must be > 0");
  }
};

// Macro state: foam cell concentration at a macro time point.
struct FoamCellState {
  double c_s = 0.0;  // dimensionless, 0 <= c_s < 1
  double t = 0.0;    // days
};

// Magnitude of the wall shear stress acting on the vessel wall, collapsed to
// a single scalar.
struct WallShearMagnitude {
  double value = 0.0;
};

// Growth rate of the foam cell concentration,
//   gamma(sigma, c_s) = alpha / (1 + c_s) * (1 + sigma^2/sigma0^2)^-1.
// Strictly positive, bounded by alpha and strictly decreasing in both
// arguments: high shear and high concentration both slow the growth down.
inline double growth_rate(WallShearMagnitude sigma_ws, double c_s,
                          const GrowthParams& p) {
  if (c_s < 0.0) throw std::domain_error("growth_rate: c_s must be >= 0");
  if (sigma_ws.value < 0.0)
    throw std::domain_error("growth_rate: wall shear must be >= 0");
  const double shear_ratio = sigma_ws.value / p.sigma0;
  return p.alpha / (1.0 + c_s) / (1.0 + shear_ratio * shear_ratio);
}

// Spatial profile of the growth, g(x, y, c_s) = 1 + c_s exp(-x^2) (2 - |y|).
// Largest at (0, +-1), decaying in x; g = 1 means no growth. Defined for
// |y| <= 2 (the channel cross section).
inline double growth_function(double x_hat, double y_hat, double c_s) {
  if (std::abs(y_hat) > 2.0)
    throw std::domain_error("growth_function: |y_hat| must be <= 2");
  return 1.0 + c_s * std::exp(-x_hat * x_hat) * (2.0 - std::abs(y_hat));
}

// One forward Euler step of the macro ODE with a cycle-averaged growth rate:
//   c' = c + dt * 86400 * gamma_bar,  t' = t + dt.
inline FoamCellState macro_euler_step(const FoamCellState& state,
                                      double gamma_bar, double dt_days) {
  if (!(dt_days > 0.0))
    throw std::domain_error("macro_euler_step: dt_days must be > 0");
  if (gamma_bar < 0.0)
    throw std::domain_error("macro_euler_step: gamma_bar must be >= 0");
  FoamCellState next;
  next.c_s = state.c_s + dt_days * kSecondsPerDay * gamma_bar;
  next.t = state.t + dt_days;
  if (next.c_s >= 1.0) throw LumenClosureError(next.c_s);
  return next;
}

}  // namespace tempoloop
