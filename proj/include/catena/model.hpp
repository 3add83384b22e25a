#pragma once

#include <cmath>
#include <cstddef>
#include <string_view>
#include <vector>

#include "catena/grid.hpp"

namespace catena {

enum class Model { Sar, Fbp };

constexpr std::string_view to_string(Model m) { return m == Model::Sar ? "sar" : "fbp"; }

/// Physical parameters of one stationary or dynamic problem.
struct ModelParams {
  double sigma = 2.0;
  double lambda = 0.0;
  Model model = Model::Sar;
  std::size_t n_eta = 0;  ///< potential grid in the gap (FBP only); 0 picks (n_z + 1)/2 + 1
};

/// Electrostatic force density g at every node of a profile.
struct ForceField {
  Grid grid;
  std::vector<double> values;

  ForceField() : grid(3), values(3, 0.0) {}
  ForceField(Grid g, std::vector<double> v) : grid(g), values(std::move(v)) {}
  double operator[](std::size_t i) const { return values[i]; }
};

/// Discrete capillary operator F(u) = sigma (arctan(sigma u'))' - 1/(u+1) at the
/// interior nodes (ends hold 0), with the arctan flux on cell midpoints.
inline std::vector<double> capillary_operator(const Profile& u, double sigma) {
  require_gap(u.values);
  const std::size_t n = u.size();
  const double h = u.grid.spacing();
  std::vector<double> flux(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) flux[i] = std::atan(sigma * (u[i + 1] - u[i]) / h);
  std::vector<double> f(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    f[i] = sigma * (flux[i] - flux[i - 1]) / h - 1.0 / (u[i] + 1.0);
  }
  return f;
}

/// Stationary residual r = -(F(u) + lambda g) on the interior nodes, ends 0.
/// r == 0 characterizes stationary solutions and du/dt = -r is the evolution.
inline std::vector<double> stationary_residual(const Profile& u, double sigma, double lambda,
                                               const ForceField& g) {
  auto r = capillary_operator(u, sigma);
  for (std::size_t i = 1; i + 1 < r.size(); ++i) r[i] = -(r[i] + lambda * g[i]);
  return r;
}

}  // namespace catena
