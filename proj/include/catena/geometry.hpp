#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "catena/error.hpp"
#include "catena/grid.hpp"

namespace catena {

enum class Branch { Inner, Outer };

constexpr std::string_view to_string(Branch b) { return b == Branch::Inner ? "inner" : "outer"; }

namespace detail {

/// Bisection on a sign change of f over [a, b], then Newton polish with df.
/// Bisection keeps the bracket so the polish can never leave it.
template <class F, class DF>
double bracketed_root(F&& f, DF&& df, double a, double b, double tol) {
  double fa = f(a);
  double fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0) == (fb > 0)) {
    throw Error(ErrorKind::NotBracketed,
                "no sign change on [" + std::to_string(a) + ", " + std::to_string(b) + "]");
  }
  for (int it = 0; it < 80 && b - a > 1e-10 * (1.0 + std::abs(a)); ++it) {
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    if (fm == 0.0) return m;
    if ((fm > 0) == (fa > 0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  double x = 0.5 * (a + b);
  for (int it = 0; it < 20; ++it) {
    const double fx = f(x);
    if (std::abs(fx) <= tol) break;
    const double step = fx / df(x);
    const double next = x - step;
    if (!(next > a && next < b)) break;
    if (next == x) break;
    x = next;
  }
  return x;
}

}  // namespace detail

/// Catenoid branch constants for one aspect ratio: the two roots of
/// cosh(c)/c = sigma on either side of c_crit.
struct BranchPair {
  double sigma = 0.0;
  double c_out = 0.0;
  double c_in = 0.0;
  double c_crit = 0.0;
  double sigma_crit = 0.0;

  [[nodiscard]] double c(Branch b) const { return b == Branch::Inner ? c_in : c_out; }
};

/// Root of c sinh(c) - cosh(c) on (0, inf); the fold of the catenoid family.
inline double solve_c_crit() {
  static const double value = [] {
    auto f = [](double c) { return c * std::sinh(c) - std::cosh(c); };
    auto df = [](double c) { return c * std::cosh(c); };
    return detail::bracketed_root(f, df, 1.0, 2.0, 1e-15);
  }();
  return value;
}

inline double sigma_crit() { return std::cosh(solve_c_crit()) / solve_c_crit(); }

/// Both catenoid constants for sigma. Throws NoSolution below sigma_crit.
inline BranchPair solve_branches(double sigma) {
  const double cc = solve_c_crit();
  const double sc = sigma_crit();
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw Error(ErrorKind::InvalidConfig, "sigma must be positive");
  }
  BranchPair bp{sigma, cc, cc, cc, sc};
  if (std::abs(sigma - sc) <= 1e-12) return bp;
  if (sigma < sc) {
    throw Error(ErrorKind::NoSolution, "no catenoid for sigma = " + std::to_string(sigma) +
                                           " below sigma_crit = " + std::to_string(sc));
  }
  auto f = [sigma](double c) { return std::cosh(c) / c - sigma; };
  auto df = [](double c) { return (c * std::sinh(c) - std::cosh(c)) / (c * c); };

  // cosh(c)/c > 1/c, so c = 1/sigma already lies left of the outer root.
  double lo = std::min(1.0 / sigma, 0.5 * cc);
  bp.c_out = detail::bracketed_root(f, df, lo, cc, 1e-13 * sigma);
  double hi = 2.0 * cc;
  while (f(hi) < 0.0) hi *= 2.0;
  bp.c_in = detail::bracketed_root(f, df, cc, hi, 1e-13 * sigma);
  return bp;
}

/// u(z) = cosh(c z)/cosh(c) - 1 sampled on the grid.
inline Profile catenoid_profile(double c, const Grid& grid) {
  Profile p(grid);
  const double cc = std::cosh(c);
  for (std::size_t i = 0; i < grid.size(); ++i) p[i] = std::cosh(c * grid.z(i)) / cc - 1.0;
  p[0] = 0.0;
  p[grid.size() - 1] = 0.0;
  return p;
}

/// E(u) = integral of (u + 1) sqrt(1 + sigma^2 u'^2) with centered slopes and Simpson.
inline double surface_energy(const Profile& u, double sigma) {
  const double h = u.grid.spacing();
  const auto du = derivative(u.values, h);
  std::vector<double> f(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    f[i] = (u[i] + 1.0) * std::sqrt(1.0 + sigma * sigma * du[i] * du[i]);
  }
  return simpson(f, h);
}

}  // namespace catena
