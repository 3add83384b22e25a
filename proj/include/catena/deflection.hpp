#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "catena/error.hpp"
#include "catena/fbp_solver.hpp"
#include "catena/geometry.hpp"
#include "catena/grid.hpp"
#include "catena/model.hpp"
#include "catena/parallel.hpp"
#include "catena/sar_solver.hpp"
#include "catena/tridiagonal.hpp"

namespace catena {

/// d u^0 / d lambda at lambda = 0: solves DF(u0) w = -g with w(+-1) = 0.
inline Profile sensitivity(const Profile& u0, const ForceField& force, double sigma) {
  const std::size_t n = u0.size();
  const auto df = capillary_jacobian(u0, sigma);
  std::vector<double> rhs(n - 2);
  for (std::size_t i = 1; i + 1 < n; ++i) rhs[i - 1] = -force[i];
  const auto w = solve(df, rhs, ErrorKind::SingularOperator);
  Profile out(u0.grid);
  for (std::size_t i = 1; i + 1 < n; ++i) out[i] = w[i - 1];
  return out;
}

enum class SignKind { AllNegative, AllPositive, TwoSignChanges, Mixed };

constexpr std::string_view to_string(SignKind k) {
  switch (k) {
    case SignKind::AllNegative:
      return "AllNegative";
    case SignKind::AllPositive:
      return "AllPositive";
    case SignKind::TwoSignChanges:
      return "TwoSignChanges";
    case SignKind::Mixed:
      return "Mixed";
  }
  return "?";
}

/// Sign structure of a profile on the interior nodes. For two sign changes,
/// r0 is the half distance between the linearly interpolated zeros and
/// center_negative records the sign on (-r0, r0).
struct SignPattern {
  SignKind kind = SignKind::Mixed;
  double r0 = 0.0;
  bool center_negative = false;
  std::vector<double> zeros;
};

inline SignPattern classify_sign(const Profile& w) {
  const std::size_t n = w.size();
  SignPattern p;
  std::size_t pos = 0;
  std::size_t neg = 0;
  std::size_t last = 0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (w[i] > 0.0) ++pos;
    if (w[i] < 0.0) ++neg;
    if (w[i] == 0.0) continue;
    if (last != 0 && (w[i] > 0.0) != (w[last] > 0.0)) {
      const double t = w[last] / (w[last] - w[i]);
      const double zl = w.grid.z(last);
      p.zeros.push_back(zl + t * (w.grid.z(i) - zl));
    }
    last = i;
  }
  if (neg == n - 2) {
    p.kind = SignKind::AllNegative;
  } else if (pos == n - 2) {
    p.kind = SignKind::AllPositive;
  } else if (p.zeros.size() == 2) {
    p.kind = SignKind::TwoSignChanges;
    p.r0 = 0.5 * (p.zeros[1] - p.zeros[0]);
    p.center_negative = w.at_center() < 0.0;
  }
  return p;
}

/// phi(z) = cosh(c z) - c z sinh(c z), the solution of the zero-eigenvalue
/// problem with phi(0) = 1, phi'(0) = 0.
inline double phi_value(double c, double z) { return std::cosh(c * z) - c * z * std::sinh(c * z); }

struct PhiSamples {
  Profile values;
  double ode_residual = 0.0;  ///< max |(phi'/cosh^2)' + c^2 phi/cosh^2| by differences
  std::vector<double> zeros;  ///< bisection roots, ascending
};

/// Samples of phi together with a finite-difference check of its ODE and its two zeros.
inline PhiSamples phi(double c_in, const Grid& grid) {
  if (!(c_in > 0.0)) throw Error(ErrorKind::InvalidConfig, "phi: c must be positive");
  PhiSamples out{
      Profile::from_function(grid, [c_in](double z) { return phi_value(c_in, z); }), 0.0, {}};
  const double h = grid.spacing();
  for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
    const double z = grid.z(i);
    auto p = [c_in](double x) { return 1.0 / std::pow(std::cosh(c_in * x), 2); };
    const double flux_r = p(z + 0.5 * h) * (out.values[i + 1] - out.values[i]) / h;
    const double flux_l = p(z - 0.5 * h) * (out.values[i] - out.values[i - 1]) / h;
    const double r = (flux_r - flux_l) / h + c_in * c_in * p(z) * out.values[i];
    out.ode_residual = std::max(out.ode_residual, std::abs(r));
  }
  auto f = [c_in](double z) { return phi_value(c_in, z); };
  auto df = [c_in](double z) { return -c_in * c_in * z * std::cosh(c_in * z); };
  if (f(1.0) < 0.0) {
    const double root = detail::bracketed_root(f, df, 0.0, 1.0, 1e-14);
    out.zeros = {-root, root};
  }
  return out;
}

struct CriterionIntegral {
  double full = 0.0;  ///< integral of g_sar phi over (-1, 1) on the inner catenoid
  double I1 = 0.0;
  double identity_defect = 0.0;  ///< full / (2 cosh^2(c) / c) - I1
};

namespace detail {

inline constexpr std::size_t kQuadratureCells = 20000;

/// (1 - z tanh z) / ln^2(2 cosh c / cosh z) for z in [0, c].
inline double i1_integrand(double c, double z) {
  const double l = std::log(2.0 * std::cosh(c) / std::cosh(z));
  return (1.0 - z * std::tanh(z)) / (l * l);
}

}  // namespace detail

inline double I1(double sigma) {
  const double c = solve_branches(sigma).c_in;
  return simpson([c](double z) { return detail::i1_integrand(c, z); }, 0.0, c,
                 detail::kQuadratureCells);
}

/// Integral of g_sar phi over the physical interval, with g_sar evaluated from
/// the analytic catenoid, and I1 from the substituted form.
inline CriterionIntegral criterion_integral(double sigma) {
  const auto bp = solve_branches(sigma);
  const double c = bp.c_in;
  const double cc = std::cosh(c);
  auto integrand = [c, cc, sigma](double z) {
    const double u = std::cosh(c * z) / cc - 1.0;
    const double du = c * std::sinh(c * z) / cc;
    return std::sqrt(1.0 + sigma * sigma * du * du) * detail::gap_factor(u) * phi_value(c, z);
  };
  CriterionIntegral out;
  out.full = simpson(integrand, -1.0, 1.0, 2 * detail::kQuadratureCells);
  out.I1 = simpson([c](double z) { return detail::i1_integrand(c, z); }, 0.0, c,
                   detail::kQuadratureCells);
  out.identity_defect = out.full / (2.0 * cc * cc / c) - out.I1;
  return out;
}

/// Integral of 1 - z tanh z over [0, c_in].
inline double I4(double sigma) {
  const double c = solve_branches(sigma).c_in;
  return simpson([](double z) { return 1.0 - z * std::tanh(z); }, 0.0, c, detail::kQuadratureCells);
}

struct SigmaThresholds {
  double sigma_star_est = 0.0;        ///< first zero of I1: empirical boundary of inward deflection
  double sigma_upper_star_est = 0.0;  ///< zero of I4: sufficient bound for sign-changing deflection
  std::vector<std::pair<double, double>> i1_sweep;  ///< (sigma, I1) scan samples
  std::vector<std::pair<double, double>> i4_sweep;
};

namespace detail {

/// Bisection in sigma on a bracket where `f` changes sign.
template <class F>
double bisect_sigma(F&& f, double a, double b) {
  double fa = f(a);
  for (int it = 0; it < 200 && b - a > 1e-14 * b; ++it) {
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    if (fm == 0.0) return m;
    if ((fm > 0.0) == (fa > 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

inline constexpr std::size_t kThresholdSamples = 200;

}  // namespace detail

/// Scans 200 log-spaced sigma in (sigma_crit, sigma_max] for the first zero
/// crossing of I1 and of I4, then bisects each.
inline SigmaThresholds find_sigma_thresholds(double sigma_max = 50.0) {
  const double sc = sigma_crit();
  const double top = sigma_max;
  if (!(top > sc))
    throw Error(ErrorKind::InvalidConfig, "thresholds: sigma_max must exceed sigma_crit");
  SigmaThresholds out;
  const std::size_t m = detail::kThresholdSamples;
  std::vector<double> sig(m);
  for (std::size_t k = 0; k < m; ++k) {
    sig[k] = sc * std::pow(top / sc, static_cast<double>(k + 1) / static_cast<double>(m));
  }
  const auto values = parallel_map(sig, [](double s) { return std::pair{I1(s), I4(s)}; });
  for (std::size_t k = 0; k < m; ++k) {
    out.i1_sweep.emplace_back(sig[k], values[k].first);
    out.i4_sweep.emplace_back(sig[k], values[k].second);
  }
  auto first_crossing = [](const std::vector<std::pair<double, double>>& sweep)
      -> std::optional<std::pair<double, double>> {
    for (std::size_t k = 0; k + 1 < sweep.size(); ++k) {
      if ((sweep[k].second > 0.0) != (sweep[k + 1].second > 0.0)) {
        return std::pair{sweep[k].first, sweep[k + 1].first};
      }
    }
    return std::nullopt;
  };
  const auto b1 = first_crossing(out.i1_sweep);
  const auto b4 = first_crossing(out.i4_sweep);
  if (!b1)
    throw Error(ErrorKind::NotBracketed,
                "thresholds: I1 has no sign change in (sigma_crit, " + std::to_string(top) + "]");
  if (!b4)
    throw Error(ErrorKind::NotBracketed,
                "thresholds: I4 has no sign change in (sigma_crit, " + std::to_string(top) + "]");
  out.sigma_star_est = detail::bisect_sigma([](double s) { return I1(s); }, b1->first, b1->second);
  out.sigma_upper_star_est =
      detail::bisect_sigma([](double s) { return I4(s); }, b4->first, b4->second);
  return out;
}

struct IntersectionReport {
  std::vector<double> crossings;
  std::size_t count = 0;
};

namespace detail {

/// Cubic through the four nodes around cell [i, i+1] (clamped at the ends).
inline double cubic_at(std::span<const double> d, const Grid& g, std::size_t i, double z) {
  const std::size_t n = d.size();
  std::size_t a = i == 0 ? 0 : i - 1;
  if (a + 3 >= n) a = n - 4;
  double sum = 0.0;
  for (std::size_t k = a; k < a + 4; ++k) {
    double l = 1.0;
    for (std::size_t j = a; j < a + 4; ++j) {
      if (j != k) l *= (z - g.z(j)) / (g.z(k) - g.z(j));
    }
    sum += l * d[k];
  }
  return sum;
}

}  // namespace detail

/// Strict sign changes of u_a - u_b on (-1, 1), refined by bisection on a
/// local cubic interpolant to 1e-10.
inline IntersectionReport intersections(const Profile& u_a, const Profile& u_b) {
  if (!(u_a.grid == u_b.grid)) throw Error(ErrorKind::InvalidConfig, "intersections: grids differ");
  const auto& g = u_a.grid;
  const std::size_t n = g.size();
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = u_a[i] - u_b[i];
  IntersectionReport out;
  std::size_t last = 0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (d[i] == 0.0) continue;
    if (last != 0 && (d[i] > 0.0) != (d[last] > 0.0)) {
      if (i - last > 1) {
        out.crossings.push_back(g.z(last + 1));
      } else {
        double a = g.z(last);
        double b = g.z(i);
        const bool pos_a = d[last] > 0.0;
        while (b - a > 1e-10) {
          const double m = 0.5 * (a + b);
          const double fm = detail::cubic_at(d, g, last, m);
          if (fm == 0.0) {
            a = b = m;
            break;
          }
          ((fm > 0.0) == pos_a ? a : b) = m;
        }
        out.crossings.push_back(0.5 * (a + b));
      }
    }
    last = i;
  }
  out.count = out.crossings.size();
  return out;
}

struct DeflectionReport {
  double sigma = 0.0;
  Branch branch = Branch::Outer;
  Model model = Model::Sar;
  Profile sensitivity;
  SignPattern sign_pattern;
  double criterion_integral = 0.0;
  double I1 = 0.0;
  double I4 = 0.0;
  std::pair<double, double> end_slopes{0.0, 0.0};
};

inline std::pair<double, double> end_slopes(const Profile& w) {
  const auto dw = derivative(w.values, w.grid.spacing());
  return {dw.front(), dw.back()};
}

/// Sensitivity of the catenoid of the given branch and its sign analysis.
/// The criterion integrals always refer to the inner catenoid of sigma.
inline DeflectionReport deflect(double sigma, Branch branch, Model model, const Grid& grid,
                                std::size_t n_eta = 0) {
  const auto bp = solve_branches(sigma);
  const auto u0 = catenoid_profile(bp.c(branch), grid);
  const auto g = model == Model::Sar ? gsar(u0, sigma) : fbp_force(u0, sigma, n_eta);
  DeflectionReport rep;
  rep.sigma = sigma;
  rep.branch = branch;
  rep.model = model;
  rep.sensitivity = sensitivity(u0, g, sigma);
  rep.sign_pattern = classify_sign(rep.sensitivity);
  const auto ci = criterion_integral(sigma);
  rep.criterion_integral = ci.full;
  rep.I1 = ci.I1;
  rep.I4 = I4(sigma);
  rep.end_slopes = end_slopes(rep.sensitivity);
  return rep;
}

struct AntimaxReport {
  double sigma = 0.0;
  double integral = 0.0;
  SignPattern pattern;
  std::pair<double, double> end_slopes{0.0, 0.0};
  double lagrange_lhs = 0.0;  ///< phi(1) w'(1) / cosh^2(c)
  double lagrange_rhs = 0.0;  ///< -(1 / (2 sigma^2)) integral of g_sar phi
  double lagrange_relative = 0.0;
};

/// Checks the anti-maximum implication on the inner catenoid: a positive
/// criterion integral forces w < 0 with w'(-1) < 0 < w'(1); a negative one
/// forces w < 0 on (-r0, r0), w > 0 outside, with the matching slopes at the
/// ends and at +-r0. Also checks the Lagrange identity between w'(1) and the
/// integral. Throws CriterionViolated if either fails.
inline AntimaxReport antimax_crossvalidate(double sigma, const Grid& grid = Grid(8001)) {
  const auto bp = solve_branches(sigma);
  const double c = bp.c_in;
  const auto u0 = catenoid_profile(c, grid);
  const auto w = sensitivity(u0, gsar(u0, sigma), sigma);
  const auto dw = derivative(w.values, grid.spacing());

  AntimaxReport rep;
  rep.sigma = sigma;
  rep.integral = criterion_integral(sigma).full;
  rep.pattern = classify_sign(w);
  rep.end_slopes = {dw.front(), dw.back()};
  const double ch = std::cosh(c);
  rep.lagrange_lhs = phi_value(c, 1.0) * dw.back() / (ch * ch);
  rep.lagrange_rhs = -rep.integral / (2.0 * sigma * sigma);
  rep.lagrange_relative =
      std::abs(rep.lagrange_lhs - rep.lagrange_rhs) / std::abs(rep.lagrange_rhs);

  auto fail = [&](const std::string& what) {
    throw Error(ErrorKind::CriterionViolated,
                "anti-maximum check at sigma = " + std::to_string(sigma) + ": " + what);
  };
  if (rep.integral > 0.0) {
    if (rep.pattern.kind != SignKind::AllNegative) fail("positive integral but w is not negative");
    if (!(dw.front() < 0.0 && dw.back() > 0.0)) fail("end slopes inconsistent with w < 0");
  } else if (rep.integral < 0.0) {
    if (rep.pattern.kind != SignKind::TwoSignChanges || !rep.pattern.center_negative) {
      fail("negative integral but w is not negative inside and positive outside");
    }
    if (!(dw.front() > 0.0 && dw.back() < 0.0))
      fail("end slopes inconsistent with w > 0 near the ends");
    const double h = grid.spacing();
    const auto i_r = static_cast<std::size_t>(std::lround((rep.pattern.r0 + 1.0) / h));
    const std::size_t i_l = grid.size() - 1 - i_r;
    if (!(dw[i_r] > 0.0 && dw[i_l] < 0.0)) fail("slopes at +-r0 inconsistent with the crossing");
  }
  if (!(rep.lagrange_relative <= 1e-4)) {
    fail("Lagrange identity off by " + std::to_string(rep.lagrange_relative) + " relative");
  }
  return rep;
}

}  // namespace catena
