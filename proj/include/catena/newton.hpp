#pragma once

#include <cmath>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "catena/error.hpp"
#include "catena/grid.hpp"
#include "catena/tridiagonal.hpp"

namespace catena {

struct NewtonOptions {
  double tol = 1e-10;  ///< stop when max |r_i| <= tol
  int max_iter = 50;
  double armijo = 1e-4;  ///< sufficient-decrease slope parameter
  double backtrack = 0.5;
  int max_backtracks = 20;
  double noise_floor = 0.0;  ///< residual level at which stagnation counts as converged
};

struct NewtonResult {
  Profile u;
  int iterations = 0;
  double residual = 0.0;        ///< max norm of the final residual
  bool at_noise_floor = false;  ///< stopped by stagnation below opt.noise_floor, not by tol
};

using ResidualFn = std::function<std::vector<double>(const Profile&)>;
using JacobianFn = std::function<TridiagonalOperator(const Profile&)>;

namespace detail {

inline double sum_squares(const std::vector<double>& r) {
  return std::inner_product(r.begin(), r.end(), r.begin(), 0.0);
}

}  // namespace detail

/// Damped Newton for r(u) = 0 with Dirichlet ends, where `jacobian` returns
/// J with dr/du = -J on the interior nodes (so the step solves J du = r).
/// Armijo backtracking on ||r||_2; trial points outside the admissible set
/// count as failed trials. Once the residual is below `noise_floor`, a failed
/// line search or a step that does not halve the residual ends the iteration.
inline NewtonResult damped_newton(const ResidualFn& residual, const JacobianFn& jacobian,
                                  Profile init, const NewtonOptions& opt = {}) {
  const std::size_t n = init.size();
  init[0] = 0.0;
  init[n - 1] = 0.0;
  NewtonResult out{std::move(init), 0, 0.0};
  auto r = residual(out.u);
  double phi = detail::sum_squares(r);
  for (int it = 0;; ++it) {
    out.residual = max_abs(r);
    out.iterations = it;
    if (out.residual <= opt.tol) return out;
    const bool floor_reached = out.residual <= opt.noise_floor;
    if (it >= opt.max_iter) {
      if (floor_reached) {
        out.at_noise_floor = true;
        return out;
      }
      throw Error(ErrorKind::NoConvergence, "Newton: residual " + std::to_string(out.residual) +
                                                " after " + std::to_string(it) + " iterations");
    }
    const auto jac = jacobian(out.u);
    const std::span<const double> rhs(r.data() + 1, n - 2);
    const auto step = solve(jac, rhs, ErrorKind::SingularJacobian);

    double t = 1.0;
    bool accepted = false;
    for (int k = 0; k <= opt.max_backtracks; ++k, t *= opt.backtrack) {
      Profile trial = out.u;
      for (std::size_t i = 1; i + 1 < n; ++i) trial[i] += t * step[i - 1];
      std::vector<double> rt;
      try {
        rt = residual(trial);
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::SingularGap) continue;
        throw;
      }
      const double phit = detail::sum_squares(rt);
      if (std::isfinite(phit) && phit <= (1.0 - 2.0 * opt.armijo * t) * phi) {
        out.u = std::move(trial);
        r = std::move(rt);
        phi = phit;
        accepted = true;
        break;
      }
    }
    if (floor_reached && (!accepted || max_abs(r) > 0.5 * out.residual)) {
      if (accepted) {
        out.residual = max_abs(r);
        out.iterations = it + 1;
      }
      out.at_noise_floor = true;
      return out;
    }
    if (!accepted) {
      throw Error(ErrorKind::NoConvergence,
                  "Newton: line search failed at residual " + std::to_string(out.residual));
    }
  }
}

}  // namespace catena
