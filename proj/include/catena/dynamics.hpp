#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "catena/error.hpp"
#include "catena/fbp_solver.hpp"
#include "catena/grid.hpp"
#include "catena/model.hpp"
#include "catena/sar_solver.hpp"
#include "catena/tridiagonal.hpp"

namespace catena {

// du/dt = sigma (arctan(sigma u_z))_z - 1/(u+1) + lambda g(u),  u(+-1) = 0.
//
// One step freezes a(u) = 1/(1 + sigma^2 u_z^2) at u^n and solves
//   (I - dt L) (u^{n+1} - u^n) = dt (F(u^n) + lambda g(u^n)),   L = sigma^2 D-(a D+),
// so stationary solutions are exact fixed points of the scheme.

/// Frozen-coefficient diffusion sigma^2 D-(a(u) D+ .) on the interior nodes.
inline TridiagonalOperator frozen_diffusion(const Profile& u, double sigma) {
  const std::size_t n = u.size();
  const double h = u.grid.spacing();
  const double s2h2 = sigma * sigma / (h * h);
  TridiagonalOperator t(n - 2);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    const std::size_t i = k + 1;
    const double pl = sigma * (u[i] - u[i - 1]) / h;
    const double pr = sigma * (u[i + 1] - u[i]) / h;
    const double al = 1.0 / (1.0 + pl * pl);
    const double ar = 1.0 / (1.0 + pr * pr);
    t.lower[k] = s2h2 * al;
    t.upper[k] = s2h2 * ar;
    t.diag[k] = -s2h2 * (al + ar);
  }
  return t;
}

/// One semi-implicit step. Throws Touchdown / CeilingContact when the new
/// profile leaves the admissible gap.
inline Profile step(const Profile& u, double dt, const ModelParams& params) {
  if (!(dt > 0.0)) throw Error(ErrorKind::InvalidConfig, "step: dt must be positive");
  const std::size_t n = u.size();
  const auto r = model_residual(u, params);
  auto m = frozen_diffusion(u, params.sigma);
  m *= -dt;
  for (auto& d : m.diag) d += 1.0;
  std::vector<double> rhs(n - 2);
  for (std::size_t i = 1; i + 1 < n; ++i) rhs[i - 1] = -dt * r[i];
  const auto du = solve(m, rhs, ErrorKind::SingularOperator);
  Profile next = u;
  next[0] = 0.0;
  next[n - 1] = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) next[i] += du[i - 1];
  const auto [lo, hi] = std::minmax_element(next.values.begin(), next.values.end());
  if (*lo + 1.0 <= kGapEpsilon) {
    throw Error(ErrorKind::Touchdown, "min u + 1 = " + std::to_string(*lo + 1.0));
  }
  if (*hi >= 1.0 - kGapEpsilon) {
    throw Error(ErrorKind::CeilingContact, "max u = " + std::to_string(*hi));
  }
  return next;
}

enum class EventKind { None, Touchdown, CeilingContact, LeftBall };

constexpr std::string_view to_string(EventKind e) {
  switch (e) {
    case EventKind::None:
      return "None";
    case EventKind::Touchdown:
      return "Touchdown";
    case EventKind::CeilingContact:
      return "CeilingContact";
    case EventKind::LeftBall:
      return "LeftBall";
  }
  return "?";
}

struct Trajectory {
  std::vector<double> times;
  std::vector<Profile> profiles;
  std::vector<double> norms;  ///< max-norm distance to `reference`
  Profile reference;
  ModelParams params;
  EventKind event = EventKind::None;
  double event_time = 0.0;
};

struct EvolveOptions {
  double exit_radius =
      std::numeric_limits<double>::infinity();  ///< stop once the distance exceeds this
  bool keep_profiles = true;
};

/// Steps from u0 until t >= T, an event, or the distance to `reference`
/// exceeds opt.exit_radius. Events end the trajectory; they are not errors.
inline Trajectory evolve(const Profile& u0, double T, double dt, const ModelParams& params,
                         const Profile& reference, const EvolveOptions& opt = {}) {
  if (!(T > 0.0) || !(dt > 0.0)) {
    throw Error(ErrorKind::InvalidConfig, "evolve: T and dt must be positive");
  }
  if (!(u0.grid == reference.grid)) {
    throw Error(ErrorKind::InvalidConfig, "evolve: initial profile and reference grids differ");
  }
  require_gap(u0.values);
  Trajectory tr;
  tr.reference = reference;
  tr.params = params;
  auto record = [&](double t, const Profile& u) {
    tr.times.push_back(t);
    tr.norms.push_back(max_abs_diff(u.values, reference.values));
    if (opt.keep_profiles) tr.profiles.push_back(u);
  };
  Profile u = u0;
  record(0.0, u);
  const auto steps = static_cast<std::size_t>(std::ceil(T / dt - 1e-9));
  for (std::size_t k = 1; k <= steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    try {
      u = step(u, dt, params);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::Touchdown || e.kind() == ErrorKind::CeilingContact) {
        tr.event =
            e.kind() == ErrorKind::Touchdown ? EventKind::Touchdown : EventKind::CeilingContact;
        tr.event_time = t;
        return tr;
      }
      throw;
    }
    record(t, u);
    if (tr.norms.back() > opt.exit_radius) {
      tr.event = EventKind::LeftBall;
      tr.event_time = t;
      return tr;
    }
  }
  if (!opt.keep_profiles) tr.profiles.push_back(u);
  return tr;
}

enum class Verdict { Stable, Unstable };

constexpr std::string_view to_string(Verdict v) {
  return v == Verdict::Stable ? "Stable" : "Unstable";
}

struct StabilityReport {
  Profile reference;
  double fitted_rate = 0.0;     ///< slope of log(distance) in t; negative for decay
  double spectral_bound = 0.0;  ///< largest eigenvalue of the discrete linearization
  double growth_factor = 0.0;   ///< max distance over initial distance
  std::size_t fit_samples = 0;
  Verdict verdict = Verdict::Stable;
};

/// Leading eigenvalue of the discrete linearization DF(u) + lambda Dg_sar(u)
/// and its eigenvector (max-norm 1, zero ends).
struct LeadingMode {
  double mu = 0.0;
  Profile v;
};

inline LeadingMode leading_mode(const Profile& u, double sigma, double lambda) {
  const auto j = jacobian(u, sigma, lambda);
  LeadingMode out;
  out.mu = matrix_spectrum(j, 1).front();
  const auto x = inverse_iteration(j, out.mu);
  out.v = Profile(u.grid);
  for (std::size_t i = 0; i < x.size(); ++i) out.v[i + 1] = x[i];
  return out;
}

namespace detail {

inline constexpr double kDistanceFloor = 1e-10;

inline double log_slope(const Trajectory& tr, std::size_t first, std::size_t last) {
  double st = 0, sy = 0, stt = 0, sty = 0;
  const auto n = static_cast<double>(last - first + 1);
  for (std::size_t k = first; k <= last; ++k) {
    const double t = tr.times[k];
    const double y = std::log(tr.norms[k]);
    st += t;
    sy += y;
    stt += t * t;
    sty += t * y;
  }
  return (n * sty - st * sy) / (n * stt - st * st);
}

}  // namespace detail

/// Growth by 10x from the initial distance gives Unstable with the rate fitted
/// over that first decade; otherwise the distance has to fall by two decades
/// above the rounding floor and the rate is fitted over the final decade.
inline StabilityReport fit_decay_rate(const Trajectory& tr) {
  const std::size_t n = tr.norms.size();
  if (n < 20) throw Error(ErrorKind::InsufficientDecay, "fit: fewer than 20 samples");
  StabilityReport rep;
  rep.reference = tr.reference;
  rep.spectral_bound = leading_mode(tr.reference, tr.params.sigma, tr.params.lambda).mu;
  const double d0 = tr.norms.front();
  if (!(d0 > 0.0)) throw Error(ErrorKind::InsufficientDecay, "fit: zero initial distance");
  rep.growth_factor = *std::max_element(tr.norms.begin(), tr.norms.end()) / d0;

  if (rep.growth_factor >= 10.0) {
    std::size_t last = 0;
    while (tr.norms[last] < 10.0 * d0) ++last;
    if (last + 1 < 20) {
      throw Error(ErrorKind::InsufficientDecay, "fit: growth decade has fewer than 20 samples");
    }
    rep.fitted_rate = detail::log_slope(tr, 0, last);
    rep.fit_samples = last + 1;
    rep.verdict = Verdict::Unstable;
    return rep;
  }

  std::size_t end = n;
  while (end > 0 && !(tr.norms[end - 1] > detail::kDistanceFloor)) --end;
  if (end < 20) throw Error(ErrorKind::InsufficientDecay, "fit: distance at the rounding floor");
  const double d_end = tr.norms[end - 1];
  if (!(d0 >= 100.0 * d_end)) {
    throw Error(ErrorKind::InsufficientDecay, "fit: distance spans less than two decades (" +
                                                  std::to_string(d0) + " -> " +
                                                  std::to_string(d_end) + ")");
  }
  std::size_t first = end - 1;
  while (first > 0 && tr.norms[first - 1] <= 10.0 * d_end) --first;
  if (end - first < 20) {
    throw Error(ErrorKind::InsufficientDecay, "fit: final decade has fewer than 20 samples");
  }
  rep.fitted_rate = detail::log_slope(tr, first, end - 1);
  rep.fit_samples = end - first;
  rep.verdict = rep.fitted_rate < 0.0 ? Verdict::Stable : Verdict::Unstable;
  return rep;
}

}  // namespace catena
