#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "catena/error.hpp"

namespace catena {

/// Square tridiagonal matrix acting on the interior unknowns of a Dirichlet
/// problem. Row i reads lower[i] * x[i-1] + diag[i] * x[i] + upper[i] * x[i+1];
/// lower[0] and upper[m-1] are ignored.
struct TridiagonalOperator {
  std::vector<double> lower;
  std::vector<double> diag;
  std::vector<double> upper;

  TridiagonalOperator() = default;
  explicit TridiagonalOperator(std::size_t m) : lower(m, 0.0), diag(m, 0.0), upper(m, 0.0) {}

  [[nodiscard]] std::size_t size() const noexcept { return diag.size(); }

  [[nodiscard]] std::vector<double> apply(std::span<const double> x) const {
    const std::size_t m = size();
    std::vector<double> y(m);
    for (std::size_t i = 0; i < m; ++i) {
      double s = diag[i] * x[i];
      if (i > 0) s += lower[i] * x[i - 1];
      if (i + 1 < m) s += upper[i] * x[i + 1];
      y[i] = s;
    }
    return y;
  }

  [[nodiscard]] double max_entry() const {
    double s = 0.0;
    for (std::size_t i = 0; i < size(); ++i) {
      s = std::max({s, std::abs(lower[i]), std::abs(diag[i]), std::abs(upper[i])});
    }
    return s;
  }

  TridiagonalOperator& operator+=(const TridiagonalOperator& o) {
    for (std::size_t i = 0; i < size(); ++i) {
      lower[i] += o.lower[i];
      diag[i] += o.diag[i];
      upper[i] += o.upper[i];
    }
    return *this;
  }

  TridiagonalOperator& operator*=(double s) {
    for (std::size_t i = 0; i < size(); ++i) {
      lower[i] *= s;
      diag[i] *= s;
      upper[i] *= s;
    }
    return *this;
  }

  [[nodiscard]] TridiagonalOperator shifted(double s) const {
    TridiagonalOperator t = *this;
    for (double& d : t.diag) d -= s;
    return t;
  }

  [[nodiscard]] Eigen::MatrixXd dense() const {
    const auto m = static_cast<Eigen::Index>(size());
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
      a(i, i) = diag[i];
      if (i > 0) a(i, i - 1) = lower[i];
      if (i + 1 < m) a(i, i + 1) = upper[i];
    }
    return a;
  }
};

/// Solves T x = b by Gaussian elimination with partial pivoting (the gtsv
/// scheme). A pivot below eps * max|T| raises `on_singular`.
inline std::vector<double> solve(const TridiagonalOperator& t, std::span<const double> rhs,
                                 ErrorKind on_singular = ErrorKind::SingularOperator) {
  const std::size_t m = t.size();
  if (rhs.size() != m) throw Error(ErrorKind::InvalidConfig, "tridiagonal solve: size mismatch");
  if (m == 0) return {};
  std::vector<double> d = t.diag;
  std::vector<double> du(m, 0.0);
  std::vector<double> dl(m, 0.0);  // dl[i] = T(i+1, i); becomes the second superdiagonal
  for (std::size_t i = 0; i + 1 < m; ++i) {
    du[i] = t.upper[i];
    dl[i] = t.lower[i + 1];
  }
  std::vector<double> b(rhs.begin(), rhs.end());
  const double tiny = std::numeric_limits<double>::epsilon() * t.max_entry();
  auto singular = [&](std::size_t i) {
    throw Error(on_singular, "tridiagonal solve: zero pivot at row " + std::to_string(i));
  };

  for (std::size_t i = 0; i + 1 < m; ++i) {
    if (std::abs(d[i]) >= std::abs(dl[i])) {
      if (std::abs(d[i]) <= tiny) singular(i);
      const double fact = dl[i] / d[i];
      d[i + 1] -= fact * du[i];
      b[i + 1] -= fact * b[i];
      dl[i] = 0.0;
    } else {
      const double fact = d[i] / dl[i];
      d[i] = dl[i];
      const double temp = d[i + 1];
      d[i + 1] = du[i] - fact * temp;
      if (i + 2 < m) {
        dl[i] = du[i + 1];
        du[i + 1] = -fact * dl[i];
      } else {
        dl[i] = 0.0;
      }
      du[i] = temp;
      const double tb = b[i];
      b[i] = b[i + 1];
      b[i + 1] = tb - fact * b[i + 1];
    }
  }
  if (std::abs(d[m - 1]) <= tiny) singular(m - 1);

  b[m - 1] /= d[m - 1];
  if (m < 2) return b;
  b[m - 2] = (b[m - 2] - du[m - 2] * b[m - 1]) / d[m - 2];
  for (std::size_t k = m - 2; k-- > 0;) {
    b[k] = (b[k] - du[k] * b[k + 1] - dl[k] * b[k + 2]) / d[k];
  }
  return b;
}

namespace detail {

/// Number of eigenvalues of the symmetric tridiagonal (a, b) strictly below x.
inline std::size_t sturm_count(std::span<const double> a, std::span<const double> b2, double x) {
  std::size_t count = 0;
  double q = 1.0;
  const double tiny = std::numeric_limits<double>::min() * 1e10;
  for (std::size_t i = 0; i < a.size(); ++i) {
    q = a[i] - x - (i > 0 ? b2[i - 1] / q : 0.0);
    if (q == 0.0) q = -tiny;
    if (q < 0.0) ++count;
  }
  return count;
}

/// The `index`-th smallest eigenvalue by bisection on the Sturm count.
inline double sturm_eigenvalue(std::span<const double> a, std::span<const double> b2,
                               std::size_t index, double lo, double hi) {
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (sturm_count(a, b2, mid) > index) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

/// True when T is diagonally similar to a real symmetric matrix.
inline bool is_symmetrizable(const TridiagonalOperator& t) {
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (t.lower[i] * t.upper[i - 1] < 0.0) return false;
  }
  return true;
}

/// Largest-real-part eigenvalues of T, in descending order.
///
/// Symmetrizable operators (everything the finite-difference linearizations
/// produce on reasonable grids) go through Sturm-sequence bisection with a
/// Rayleigh-quotient polish; anything else falls back to a dense QR solve.
inline std::vector<double> matrix_spectrum(const TridiagonalOperator& t, std::size_t k);

/// Eigenvector of T for an (approximate) eigenvalue mu by inverse iteration,
/// normalized to max-norm 1 with a positive largest-magnitude entry.
inline std::vector<double> inverse_iteration(const TridiagonalOperator& t, double mu,
                                             int iterations = 6) {
  const std::size_t m = t.size();
  double shift = mu + 1e-10 * (1.0 + std::abs(mu));
  std::vector<double> x(m);
  for (std::size_t i = 0; i < m; ++i) x[i] = 1.0 + 0.1 * std::sin(0.7 * static_cast<double>(i));
  for (int it = 0; it < iterations; ++it) {
    std::vector<double> y;
    try {
      y = solve(t.shifted(shift), x);
    } catch (const Error&) {
      shift += 1e-8 * (1.0 + std::abs(mu));
      continue;
    }
    double nrm = 0.0;
    std::size_t arg = 0;
    for (std::size_t i = 0; i < m; ++i) {
      if (std::abs(y[i]) > nrm) {
        nrm = std::abs(y[i]);
        arg = i;
      }
    }
    const double s = (y[arg] > 0 ? 1.0 : -1.0) / nrm;
    for (std::size_t i = 0; i < m; ++i) x[i] = y[i] * s;
  }
  return x;
}

inline std::vector<double> matrix_spectrum(const TridiagonalOperator& t, std::size_t k) {
  const std::size_t m = t.size();
  k = std::min(k, m);
  std::vector<double> out;
  out.reserve(k);
  if (!is_symmetrizable(t)) {
    if (m > 4000) {
      throw Error(ErrorKind::NoConvergence,
                  "matrix_spectrum: operator is not symmetrizable and too large for a dense solve");
    }
    Eigen::EigenSolver<Eigen::MatrixXd> es(t.dense(), false);
    if (es.info() != Eigen::Success) {
      throw Error(ErrorKind::NoConvergence, "matrix_spectrum: dense eigensolver failed");
    }
    std::vector<double> re(static_cast<std::size_t>(es.eigenvalues().size()));
    for (std::size_t i = 0; i < re.size(); ++i)
      re[i] = es.eigenvalues()[static_cast<Eigen::Index>(i)].real();
    std::sort(re.begin(), re.end(), std::greater<>());
    re.resize(k);
    return re;
  }

  std::vector<double> a = t.diag;
  std::vector<double> b2(m > 0 ? m - 1 : 0);
  for (std::size_t i = 0; i + 1 < m; ++i) b2[i] = t.upper[i] * t.lower[i + 1];

  // Gershgorin bounds on the symmetrized matrix.
  double lo = std::numeric_limits<double>::max();
  double hi = std::numeric_limits<double>::lowest();
  for (std::size_t i = 0; i < m; ++i) {
    double r = 0.0;
    if (i > 0) r += std::sqrt(b2[i - 1]);
    if (i + 1 < m) r += std::sqrt(b2[i]);
    lo = std::min(lo, a[i] - r);
    hi = std::max(hi, a[i] + r);
  }
  const double pad = 1e-12 * std::max(1.0, std::max(std::abs(lo), std::abs(hi)));
  lo -= pad;
  hi += pad;

  for (std::size_t j = 0; j < k; ++j) {
    const std::size_t index = m - 1 - j;
    double mu = detail::sturm_eigenvalue(a, b2, index, lo, hi);
    // Rayleigh quotient on the symmetrized operator sharpens the bisection
    // estimate when the eigenvalue is well separated.
    const auto v = inverse_iteration(t, mu, 3);
    std::vector<double> sv(m);
    double scale = 1.0;
    sv[0] = v[0];
    for (std::size_t i = 1; i < m; ++i) {
      if (t.upper[i - 1] != 0.0 && t.lower[i] != 0.0)
        scale *= std::sqrt(t.lower[i] / t.upper[i - 1]);
      sv[i] = v[i] / scale;
    }
    if (std::all_of(sv.begin(), sv.end(), [](double x) { return std::isfinite(x); })) {
      double num = 0.0;
      double den = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        double s = a[i] * sv[i];
        if (i > 0) s += std::sqrt(b2[i - 1]) * sv[i - 1];
        if (i + 1 < m) s += std::sqrt(b2[i]) * sv[i + 1];
        num += sv[i] * s;
        den += sv[i] * sv[i];
      }
      const double rq = num / den;
      const double gap = 1e-6 * (1.0 + std::abs(mu));
      if (std::isfinite(rq) && std::abs(rq - mu) < gap) mu = rq;
    }
    out.push_back(mu);
  }
  return out;
}

}  // namespace catena
