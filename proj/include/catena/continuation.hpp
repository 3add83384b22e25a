#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "catena/error.hpp"
#include "catena/geometry.hpp"
#include "catena/grid.hpp"
#include "catena/model.hpp"
#include "catena/newton.hpp"

namespace catena {

struct ContinuationPoint {
  double lambda = 0.0;
  Profile u;
  bool converged = false;
  double residual = 0.0;
  int iterations = 0;
};

/// A branch lambda -> u^lambda. The lambda = 0 point is the discrete
/// stationary solution polished from the exact catenoid.
struct ContinuationCurve {
  double sigma = 0.0;
  Branch branch = Branch::Outer;
  Model model = Model::Sar;
  std::vector<ContinuationPoint> points;
  double fold_estimate = 0.0;  ///< last converged lambda
  bool complete = false;       ///< reached lambda_max
};

struct ContinuationOptions {
  NewtonOptions newton{};
  int max_halvings = 6;
  bool allow_partial = false;  ///< return a truncated curve instead of throwing
};

using StationarySolver = std::function<NewtonResult(double lambda, const Profile& init)>;

/// Uniform lambda targets with the previous solution as predictor; a failed
/// step is retried with the increment halved, up to `max_halvings` times.
inline ContinuationCurve run_continuation(double sigma, Branch branch, Model model,
                                          const Profile& start, double lambda_max,
                                          std::size_t steps, const StationarySolver& solver,
                                          const ContinuationOptions& opt) {
  if (steps == 0 || !(lambda_max >= 0.0)) {
    throw Error(ErrorKind::InvalidConfig, "continuation needs steps >= 1 and lambda_max >= 0");
  }
  ContinuationCurve curve;
  curve.sigma = sigma;
  curve.branch = branch;
  curve.model = model;

  auto base = solver(0.0, start);
  curve.points.push_back({0.0, base.u, true, base.residual, base.iterations});

  const double nominal = lambda_max / static_cast<double>(steps);
  double lambda = 0.0;
  Profile current = base.u;
  for (std::size_t k = 1; k <= steps; ++k) {
    const double target = (k == steps) ? lambda_max : nominal * static_cast<double>(k);
    double increment = target - lambda;
    int halvings = 0;
    while (lambda < target) {
      const double next = std::min(target, lambda + increment);
      try {
        auto res = solver(next, current);
        current = res.u;
        lambda = next;
        curve.points.push_back({lambda, current, true, res.residual, res.iterations});
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::InvalidConfig) throw;
        if (++halvings > opt.max_halvings) {
          curve.fold_estimate = lambda;
          if (opt.allow_partial) return curve;
          throw Error(e.kind(), std::string(e.what()) + " (continuation stalled after lambda = " +
                                    std::to_string(lambda) + ")");
        }
        increment *= 0.5;
      }
    }
  }
  curve.fold_estimate = lambda;
  curve.complete = true;
  return curve;
}

}  // namespace catena
