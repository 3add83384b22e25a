#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "catena/error.hpp"

namespace catena {

/// Lower admissibility guard for the gap u + 1 (touchdown) and the ceiling 1 - u.
inline constexpr double kGapEpsilon = 1e-6;

/// Uniform grid on [-1, 1] with an odd node count so that z = 0 is a node.
class Grid {
 public:
  explicit Grid(std::size_t n = 401) : n_(n) {
    if (n < 3 || n % 2 == 0) {
      throw Error(ErrorKind::InvalidConfig,
                  "grid node count must be odd and >= 3, got " + std::to_string(n));
    }
  }

  [[nodiscard]] std::size_t size() const noexcept { return n_; }
  [[nodiscard]] double spacing() const noexcept { return 2.0 / static_cast<double>(n_ - 1); }
  [[nodiscard]] std::size_t mid() const noexcept { return (n_ - 1) / 2; }

  /// Node i, computed symmetrically so that z(i) == -z(n-1-i) bit for bit.
  [[nodiscard]] double z(std::size_t i) const noexcept {
    const auto m = static_cast<double>(mid());
    return (static_cast<double>(i) - m) / m;
  }

  [[nodiscard]] std::vector<double> nodes() const {
    std::vector<double> out(n_);
    for (std::size_t i = 0; i < n_; ++i) out[i] = z(i);
    return out;
  }

  /// Grid with 2n-1 nodes: every old node survives, one new node per cell.
  [[nodiscard]] Grid refined() const { return Grid(2 * n_ - 1); }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::size_t n_;
};

/// Nodal values of a film displacement u on a grid.
///
/// Dirichlet ends and -1 < u < 1 are properties checked by `is_admissible`
/// rather than enforced by construction: some tests (constant profiles for the
/// potential solver) deliberately use profiles with nonzero ends.
struct Profile {
  Grid grid;
  std::vector<double> values;

  Profile() : grid(3), values(3, 0.0) {}
  explicit Profile(Grid g) : grid(g), values(g.size(), 0.0) {}
  Profile(Grid g, std::vector<double> v) : grid(g), values(std::move(v)) {
    assert(values.size() == grid.size());
  }

  static Profile from_function(Grid g, const std::function<double(double)>& f) {
    Profile p(g);
    for (std::size_t i = 0; i < g.size(); ++i) p.values[i] = f(g.z(i));
    return p;
  }

  [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
  [[nodiscard]] double at_center() const { return values[grid.mid()]; }
};

inline bool is_admissible(const Profile& u, double eps = kGapEpsilon) {
  return std::all_of(u.values.begin(), u.values.end(), [eps](double v) {
    return std::isfinite(v) && v + 1.0 > eps && v < 1.0 - eps;
  });
}

/// Throws SingularGap if the film touches the axis or the cylinder.
inline void require_gap(std::span<const double> u, double eps = kGapEpsilon) {
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!std::isfinite(u[i]) || u[i] + 1.0 <= eps) {
      throw Error(ErrorKind::SingularGap,
                  "u + 1 <= " + std::to_string(eps) + " at node " + std::to_string(i));
    }
    if (u[i] >= 1.0 - eps) {
      throw Error(ErrorKind::SingularGap,
                  "u >= 1 - " + std::to_string(eps) + " at node " + std::to_string(i));
    }
  }
}

// ---------------------------------------------------------------------------
// Finite differences and quadrature on the uniform grid.

/// First derivative: centered in the interior, second-order one-sided at the ends.
inline std::vector<double> derivative(std::span<const double> f, double h) {
  const std::size_t n = f.size();
  std::vector<double> d(n);
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
  d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
  d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
  return d;
}

/// Second derivative: centered in the interior, second-order one-sided at the ends.
inline std::vector<double> second_derivative(std::span<const double> f, double h) {
  const std::size_t n = f.size();
  std::vector<double> d(n);
  const double h2 = h * h;
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / h2;
  if (n >= 4) {
    d[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / h2;
    d[n - 1] = (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) / h2;
  } else {
    d[0] = d[1];
    d[n - 1] = d[n - 2];
  }
  return d;
}

/// Composite Simpson rule for samples on a uniform grid with an even number of cells.
inline double simpson(std::span<const double> f, double h) {
  const std::size_t n = f.size();
  assert(n >= 3 && n % 2 == 1);
  double odd = 0.0;
  double even = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) (i % 2 == 1 ? odd : even) += f[i];
  return h / 3.0 * (f[0] + f[n - 1] + 4.0 * odd + 2.0 * even);
}

/// Composite Simpson for a callable on [a, b] with `cells` (rounded up to even) cells.
template <class F>
double simpson(F&& f, double a, double b, std::size_t cells) {
  if (cells % 2 == 1) ++cells;
  const double h = (b - a) / static_cast<double>(cells);
  double odd = 0.0;
  double even = 0.0;
  for (std::size_t i = 1; i < cells; ++i) {
    const double x = a + h * static_cast<double>(i);
    (i % 2 == 1 ? odd : even) += f(x);
  }
  return h / 3.0 * (f(a) + f(b) + 4.0 * odd + 2.0 * even);
}

inline double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

/// max_i |f_i - parity * f_{n-1-i}|; parity = +1 checks evenness, -1 oddness.
inline double symmetry_defect(std::span<const double> f, double parity = 1.0) {
  const std::size_t n = f.size();
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(f[i] - parity * f[n - 1 - i]));
  return m;
}

/// Least-squares slope of log(err) against log(h); used for observed orders.
inline double fitted_order(std::span<const double> h, std::span<const double> err) {
  assert(h.size() == err.size() && h.size() >= 2);
  const auto n = static_cast<double>(h.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double x = std::log(h[i]);
    const double y = std::log(err[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace catena
