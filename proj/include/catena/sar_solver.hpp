#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "catena/continuation.hpp"
#include "catena/geometry.hpp"
#include "catena/grid.hpp"
#include "catena/model.hpp"
#include "catena/newton.hpp"
#include "catena/tridiagonal.hpp"

namespace catena {

namespace detail {

/// 1 / (s^2 ln^2(2/s)) with s = u + 1, and its derivative in u.
inline double gap_factor(double u) {
  const double s = u + 1.0;
  const double l = std::log(2.0 / s);
  return 1.0 / (s * s * l * l);
}

inline double gap_factor_derivative(double u) {
  const double s = u + 1.0;
  const double l = std::log(2.0 / s);
  return 2.0 / (s * s * s * l * l) * (1.0 / l - 1.0);
}

}  // namespace detail

/// Small-aspect-ratio force sqrt(1 + sigma^2 u'^2) / ((u+1)^2 ln^2(2/(u+1))).
inline ForceField gsar(const Profile& u, double sigma) {
  require_gap(u.values);
  const auto du = derivative(u.values, u.grid.spacing());
  std::vector<double> g(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    g[i] = std::sqrt(1.0 + sigma * sigma * du[i] * du[i]) * detail::gap_factor(u[i]);
  }
  return {u.grid, std::move(g)};
}

/// SAR residual r = -(F(u) + lambda g_sar(u)); zero at stationary solutions.
inline std::vector<double> residual(const Profile& u, double sigma, double lambda) {
  return stationary_residual(u, sigma, lambda, gsar(u, sigma));
}

/// Linearization of the capillary part, v -> sigma^2 (v' a(u'))' + v/(u+1)^2,
/// with a = 1/(1 + sigma^2 u'^2) on cell midpoints; exact derivative of
/// `capillary_operator`.
inline TridiagonalOperator capillary_jacobian(const Profile& u, double sigma) {
  require_gap(u.values);
  const std::size_t n = u.size();
  const std::size_t m = n - 2;
  const double h = u.grid.spacing();
  const double s2h2 = sigma * sigma / (h * h);
  std::vector<double> a(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double slope = sigma * (u[i + 1] - u[i]) / h;
    a[i] = 1.0 / (1.0 + slope * slope);
  }
  TridiagonalOperator t(m);
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t i = k + 1;
    t.lower[k] = s2h2 * a[i - 1];
    t.upper[k] = s2h2 * a[i];
    const double s = u[i] + 1.0;
    t.diag[k] = -s2h2 * (a[i - 1] + a[i]) + 1.0 / (s * s);
  }
  return t;
}

/// Exact derivative of the discrete g_sar at the interior nodes.
inline TridiagonalOperator gsar_jacobian(const Profile& u, double sigma) {
  require_gap(u.values);
  const std::size_t n = u.size();
  const std::size_t m = n - 2;
  const double h = u.grid.spacing();
  TridiagonalOperator t(m);
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t i = k + 1;
    const double p = (u[i + 1] - u[i - 1]) / (2.0 * h);
    const double root = std::sqrt(1.0 + sigma * sigma * p * p);
    const double dslope = sigma * sigma * p / root * detail::gap_factor(u[i]) / (2.0 * h);
    t.lower[k] = -dslope;
    t.upper[k] = dslope;
    t.diag[k] = root * detail::gap_factor_derivative(u[i]);
  }
  return t;
}

/// J = DF(u) + lambda Dg_sar(u): the linearization of du/dt = F(u) + lambda g_sar(u).
inline TridiagonalOperator jacobian(const Profile& u, double sigma, double lambda) {
  auto j = capillary_jacobian(u, sigma);
  if (lambda != 0.0) {
    auto dg = gsar_jacobian(u, sigma);
    dg *= lambda;
    j += dg;
  }
  return j;
}

/// Rounding level of the discrete residual: differencing the arctan flux twice
/// amplifies the unit roundoff of u by (sigma / h)^2.
inline double residual_noise_floor(double sigma, const Grid& grid) {
  const double k = sigma / grid.spacing();
  return 8.0 * std::numeric_limits<double>::epsilon() * k * k;
}

/// Damped Newton for the SAR stationary problem starting from `init`.
inline NewtonResult solve_stationary_sar(double sigma, double lambda, const Profile& init,
                                         NewtonOptions opt = {}) {
  opt.noise_floor = std::max(opt.noise_floor, residual_noise_floor(sigma, init.grid));
  return damped_newton([&](const Profile& u) { return residual(u, sigma, lambda); },
                       [&](const Profile& u) { return jacobian(u, sigma, lambda); }, init, opt);
}

/// Profile-only convenience wrapper.
inline Profile solve_stationary(double sigma, double lambda, const Profile& init,
                                const NewtonOptions& opt = {}) {
  return solve_stationary_sar(sigma, lambda, init, opt).u;
}

/// Natural-parameter continuation of the SAR branch that starts at the catenoid.
inline ContinuationCurve continue_in_lambda(double sigma, Branch branch, double lambda_max,
                                            std::size_t steps, const Grid& grid,
                                            const ContinuationOptions& opt = {}) {
  const auto bp = solve_branches(sigma);
  const auto start = catenoid_profile(bp.c(branch), grid);
  return run_continuation(
      sigma, branch, Model::Sar, start, lambda_max, steps,
      [&](double lambda, const Profile& init) {
        return solve_stationary_sar(sigma, lambda, init, opt.newton);
      },
      opt);
}

}  // namespace catena
