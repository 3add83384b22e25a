#pragma once

#include <algorithm>
#include <vector>

#include "catena/continuation.hpp"
#include "catena/geometry.hpp"
#include "catena/model.hpp"
#include "catena/newton.hpp"
#include "catena/potential.hpp"
#include "catena/sar_solver.hpp"

namespace catena {

/// Force of the free boundary problem: potential solve on Omega(u), then flux.
inline ForceField fbp_force(const Profile& u, double sigma, std::size_t n_eta = 0) {
  return electrostatic_force(u, solve_potential(u, sigma, n_eta), sigma);
}

/// FBP residual -(F(u) + lambda g(u)); the potential is skipped when lambda == 0.
inline std::vector<double> fbp_residual(const Profile& u, double sigma, double lambda,
                                        std::size_t n_eta = 0) {
  if (lambda == 0.0)
    return stationary_residual(u, sigma, 0.0,
                               ForceField(u.grid, std::vector<double>(u.size(), 0.0)));
  return stationary_residual(u, sigma, lambda, fbp_force(u, sigma, n_eta));
}

struct FbpOptions {
  NewtonOptions newton{1e-8, 50};
  std::size_t n_eta = 0;
};

/// Quasi-Newton for F(u) + lambda g(u) = 0. The exact derivative of the
/// nonlocal FBP force is replaced by the analytic SAR force derivative, which
/// has the same local structure; the outer loop converges linearly with a
/// rate proportional to lambda.
inline NewtonResult solve_stationary_fbp(double sigma, double lambda, const Profile& init,
                                         const FbpOptions& opt = {}) {
  auto newton = opt.newton;
  newton.noise_floor = std::max(newton.noise_floor, residual_noise_floor(sigma, init.grid));
  return damped_newton([&](const Profile& u) { return fbp_residual(u, sigma, lambda, opt.n_eta); },
                       [&](const Profile& u) { return jacobian(u, sigma, lambda); }, init, newton);
}

inline ContinuationCurve continue_in_lambda_fbp(double sigma, Branch branch, double lambda_max,
                                                std::size_t steps, const Grid& grid,
                                                const FbpOptions& fbp = {},
                                                ContinuationOptions opt = {}) {
  const auto bp = solve_branches(sigma);
  const auto start = catenoid_profile(bp.c(branch), grid);
  opt.newton = fbp.newton;
  return run_continuation(
      sigma, branch, Model::Fbp, start, lambda_max, steps,
      [&](double lambda, const Profile& init) {
        return solve_stationary_fbp(sigma, lambda, init, fbp);
      },
      opt);
}

/// Force for either model.
inline ForceField model_force(const Profile& u, const ModelParams& p) {
  return p.model == Model::Sar ? gsar(u, p.sigma) : fbp_force(u, p.sigma, p.n_eta);
}

inline std::vector<double> model_residual(const Profile& u, const ModelParams& p) {
  return p.model == Model::Sar ? residual(u, p.sigma, p.lambda)
                               : fbp_residual(u, p.sigma, p.lambda, p.n_eta);
}

inline NewtonResult solve_stationary_model(const ModelParams& p, const Profile& init,
                                           const NewtonOptions& newton) {
  if (p.model == Model::Sar) return solve_stationary_sar(p.sigma, p.lambda, init, newton);
  return solve_stationary_fbp(p.sigma, p.lambda, init, FbpOptions{newton, p.n_eta});
}

}  // namespace catena
