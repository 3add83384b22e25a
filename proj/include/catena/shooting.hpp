#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "catena/error.hpp"
#include "catena/grid.hpp"
#include "catena/parallel.hpp"
#include "catena/tridiagonal.hpp"

namespace catena {

// Sturm-Liouville problem for the linearization at the catenoid with constant c:
//
//   mu v = c^2 v / cosh^2(c z) + ( v' / cosh^2(c z) )',   v(-1) = v(1) = 0.
//
// The shooting solution starts from v(-1) = 0, v'(-1) = 1 and D(c, mu) = v(1).

struct ShotResult {
  double c = 0.0;
  double mu = 0.0;
  double D = 0.0;
  std::vector<double> v;   ///< v at the grid nodes
  std::vector<double> dv;  ///< dv/dz at the grid nodes
};

struct EigenPair {
  std::size_t index = 0;
  double mu = 0.0;
  Profile v;  ///< eigenfunction normalized to max-norm 1, v'(-1) > 0
  std::size_t nodes = 0;
};

/// Sign changes along `f`, skipping entries with |f| <= zero_tol.
inline std::size_t count_sign_changes(std::span<const double> f, double zero_tol = 1e-12) {
  std::size_t count = 0;
  int last = 0;
  for (double x : f) {
    if (std::abs(x) <= zero_tol) continue;
    const int s = x > 0 ? 1 : -1;
    if (last != 0 && s != last) ++count;
    last = s;
  }
  return count;
}

/// Integrates the flux form (v, w = v' / cosh^2(cz)) with classical RK4 on the grid.
inline ShotResult shoot(double c, double mu, const Grid& grid) {
  const std::size_t n = grid.size();
  const double h = grid.spacing();
  auto rhs = [c, mu](double z, const std::array<double, 2>& y) {
    const double ch = std::cosh(c * z);
    const double ch2 = ch * ch;
    return std::array<double, 2>{y[1] * ch2, (mu - c * c / ch2) * y[0]};
  };

  ShotResult r{c, mu, 0.0, std::vector<double>(n), std::vector<double>(n)};
  const double ch1 = std::cosh(c);
  std::array<double, 2> y{0.0, 1.0 / (ch1 * ch1)};
  r.v[0] = 0.0;
  r.dv[0] = 1.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double z = grid.z(i);
    const auto k1 = rhs(z, y);
    const auto k2 = rhs(z + 0.5 * h, {y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]});
    const auto k3 = rhs(z + 0.5 * h, {y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]});
    const auto k4 = rhs(z + h, {y[0] + h * k3[0], y[1] + h * k3[1]});
    y[0] += h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
    y[1] += h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
    const double ch = std::cosh(c * grid.z(i + 1));
    r.v[i + 1] = y[0];
    r.dv[i + 1] = y[1] * ch * ch;
  }
  r.D = y[0];
  return r;
}

namespace detail {

/// Number of eigenvalues strictly above mu: the zeros of the shooting
/// solution on (-1, 1], read off the nodal signs (Sturm oscillation).
inline std::size_t eigenvalues_above(double c, double mu, const Grid& grid) {
  const auto shot = shoot(c, mu, grid);
  return count_sign_changes(std::span<const double>(shot.v).subspan(1), 0.0);
}

}  // namespace detail

struct EigenvalueOptions {
  double scan_step = 0.25;
  double mu_lower = -1e6;
  double d_tol = 1e-10;
};

/// n-th eigenvalue (n = 0 is the largest) by scanning down from c^2 and
/// bisecting on the oscillation count, which brackets mu_n even when several
/// eigenvalues fall inside one scan step.
inline EigenPair eigenvalue(double c, std::size_t n, const Grid& grid,
                            const EigenvalueOptions& opt = {}) {
  if (!(c > 0.0)) throw Error(ErrorKind::InvalidConfig, "eigenvalue: c must be positive");
  double hi = c * c;
  if (detail::eigenvalues_above(c, hi, grid) > n) {
    throw Error(ErrorKind::NotBracketed, "eigenvalue: scan start c^2 is not above mu_n");
  }
  double step = opt.scan_step;
  double lo = hi - step;
  while (detail::eigenvalues_above(c, lo, grid) <= n) {
    hi = lo;
    // The count certifies brackets, so the step may grow once a few plain
    // steps have passed without finding mu_n.
    if (hi < c * c - 8.0 * opt.scan_step) step *= 2.0;
    lo = hi - step;
    if (lo < opt.mu_lower) {
      throw Error(ErrorKind::NotBracketed,
                  "eigenvalue: no eigenvalue of index " + std::to_string(n) + " above mu_lower = " +
                      std::to_string(opt.mu_lower) + " for c = " + std::to_string(c));
    }
  }

  ShotResult shot = shoot(c, 0.5 * (lo + hi), grid);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    shot = shoot(c, mid, grid);
    if (std::abs(shot.D) <= opt.d_tol) break;
    if (mid <= lo || mid >= hi) break;
    if (count_sign_changes(std::span<const double>(shot.v).subspan(1), 0.0) > n) {
      lo = mid;
    } else {
      hi = mid;
    }
  }

  EigenPair pair;
  pair.index = n;
  pair.mu = shot.mu;
  const double scale = max_abs(shot.v);
  pair.v = Profile(grid, shot.v);
  for (double& x : pair.v.values) x /= scale;
  const std::span<const double> interior(pair.v.values.data() + 1, grid.size() - 2);
  pair.nodes = count_sign_changes(interior, 1e-12);
  if (pair.nodes != n) {
    throw Error(ErrorKind::NoConvergence, "eigenvalue: eigenfunction has " +
                                              std::to_string(pair.nodes) + " nodes, expected " +
                                              std::to_string(n));
  }
  return pair;
}

struct EigenCurvePoint {
  double c;
  double mu;
};

struct EigenCurve {
  std::size_t index = 0;
  std::vector<EigenCurvePoint> points;
  std::size_t sign_changes = 0;
  std::optional<double> zero;   ///< located crossing (n = 0 only)
  std::optional<double> slope;  ///< centered-difference mu'(zero)
};

/// Samples c -> mu_n(c) on [c_lo, c_hi]; for n = 0 the crossing of zero is
/// refined by bisection in c.
inline EigenCurve eigencurve(double c_lo, double c_hi, std::size_t n, std::size_t samples,
                             const Grid& grid, double c_tol = 1e-10) {
  if (!(c_lo > 0.0 && c_lo < c_hi) || samples < 2) {
    throw Error(ErrorKind::InvalidConfig, "eigencurve: need 0 < c_lo < c_hi and samples >= 2");
  }
  EigenCurve curve;
  curve.index = n;
  std::vector<double> cs(samples);
  for (std::size_t k = 0; k < samples; ++k) {
    cs[k] = c_lo + (c_hi - c_lo) * static_cast<double>(k) / static_cast<double>(samples - 1);
  }
  const auto mus = parallel_map(cs, [&](double c) { return eigenvalue(c, n, grid).mu; });
  for (std::size_t k = 0; k < samples; ++k) curve.points.push_back({cs[k], mus[k]});
  std::optional<std::size_t> bracket;
  for (std::size_t k = 0; k + 1 < samples; ++k) {
    const double a = curve.points[k].mu;
    const double b = curve.points[k + 1].mu;
    if ((a < 0) != (b < 0)) {
      ++curve.sign_changes;
      if (!bracket) bracket = k;
    }
  }
  if (n == 0 && bracket) {
    double a = curve.points[*bracket].c;
    double b = curve.points[*bracket + 1].c;
    const bool a_neg = curve.points[*bracket].mu < 0;
    while (b - a > c_tol) {
      const double m = 0.5 * (a + b);
      if ((eigenvalue(m, 0, grid).mu < 0) == a_neg) {
        a = m;
      } else {
        b = m;
      }
    }
    const double z = 0.5 * (a + b);
    curve.zero = z;
    const double dc = 1e-4;
    curve.slope = (eigenvalue(z + dc, 0, grid).mu - eigenvalue(z - dc, 0, grid).mu) / (2.0 * dc);
  }
  return curve;
}

/// Finite-difference Sturm-Liouville operator v -> (v'/cosh^2)' + c^2 v/cosh^2 on the
/// interior nodes, with exact midpoint coefficients. Serves as the matrix
/// route for the same spectrum the shooting method computes.
inline TridiagonalOperator sturm_liouville_matrix(double c, const Grid& grid) {
  const std::size_t m = grid.size() - 2;
  const double h = grid.spacing();
  TridiagonalOperator t(m);
  auto p = [c](double z) {
    const double ch = std::cosh(c * z);
    return 1.0 / (ch * ch);
  };
  for (std::size_t k = 0; k < m; ++k) {
    const double z = grid.z(k + 1);
    const double pp = p(z + 0.5 * h) / (h * h);
    const double pm = p(z - 0.5 * h) / (h * h);
    t.lower[k] = pm;
    t.upper[k] = pp;
    t.diag[k] = -(pp + pm) + c * c * p(z);
  }
  return t;
}

}  // namespace catena
