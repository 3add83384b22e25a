#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "catena/cli/output.hpp"
#include "catena/continuation.hpp"
#include "catena/deflection.hpp"
#include "catena/dynamics.hpp"
#include "catena/fbp_solver.hpp"
#include "catena/geometry.hpp"
#include "catena/parallel.hpp"
#include "catena/sar_solver.hpp"
#include "catena/shooting.hpp"

namespace catena::cli {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string detail;
  json metrics = json::object();
  double seconds = 0.0;
  double budget_seconds = 0.0;

  [[nodiscard]] bool within_budget() const { return seconds <= budget_seconds; }
};

/// Closed-form shooting value at mu = 0 from the fundamental system
/// {sinh(cz), cz sinh(cz) - cosh(cz)} with v(-1) = 0, v'(-1) = 1.
inline double closed_form_shooting(double c) {
  const double y1 = std::sinh(-c);
  const double y2 = -c * std::sinh(-c) - std::cosh(-c);
  const double d1 = c * std::cosh(-c);
  const double d2 = -c * c * std::cosh(-c);
  const double det = y1 * d2 - y2 * d1;
  const double a = -y2 / det;
  const double b = y1 / det;
  return a * std::sinh(c) + b * (c * std::sinh(c) - std::cosh(c));
}

/// State shared by the criteria: continuation curves reused by 6 and 7 and
/// the sigma thresholds reused by 8.
struct AcceptanceContext {
  std::map<std::pair<int, int>, ContinuationCurve> curves;  ///< (model, branch) at sigma = 2
  std::optional<SigmaThresholds> thresholds;

  static constexpr double kSigma = 2.0;
  static constexpr double kLambdaMax = 0.05;
  static constexpr std::size_t kSteps = 10;
  static constexpr std::size_t kSarNodes = 401;
  static constexpr std::size_t kFbpNodes = 201;

  const ContinuationCurve& curve(Model m, Branch b) {
    const auto key = std::pair{static_cast<int>(m), static_cast<int>(b)};
    auto it = curves.find(key);
    if (it != curves.end()) return it->second;
    ContinuationCurve c =
        m == Model::Sar ? continue_in_lambda(kSigma, b, kLambdaMax, kSteps, Grid(kSarNodes))
                        : continue_in_lambda_fbp(kSigma, b, kLambdaMax, kSteps, Grid(kFbpNodes));
    return curves.emplace(key, std::move(c)).first->second;
  }

  const SigmaThresholds& sigma_thresholds() {
    if (!thresholds) thresholds = find_sigma_thresholds();
    return *thresholds;
  }
};

namespace detail {

inline json prov(std::size_t n, double tol, const std::string& method) {
  return json{{"grid_n", n}, {"tol", tol}, {"method", method}};
}

inline std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

// 1. c_crit and sigma_crit.
inline CriterionResult criterion_1(AcceptanceContext&) {
  CriterionResult r;
  const double cc = solve_c_crit();
  const double sc = sigma_crit();
  const bool ok_c = std::abs(cc - 1.19967864) <= 1e-6;
  const bool ok_s =
      std::abs(sc - 1.50888) <= 1e-4 && std::abs(sc - std::cosh(cc) / cc) <= 1e-14 * sc;
  r.passed = ok_c && ok_s;
  const auto p = prov(0, 1e-15, "bracketed root of c sinh c = cosh c");
  r.metrics = {{"c_crit", scalar(cc, p)}, {"sigma_crit", scalar(sc, p)}};
  r.detail = "c_crit = " + fmt(cc) + ", sigma_crit = " + fmt(sc);
  return r;
}

// 2. Shooting against the closed form at mu = 0.
inline CriterionResult criterion_2(AcceptanceContext&) {
  CriterionResult r;
  const Grid g(801);
  double worst = 0.0;
  json rows = json::array();
  for (double c : {0.6, 1.0, solve_c_crit(), 2.0, 3.0}) {
    const double d = shoot(c, 0.0, g).D;
    const double exact = closed_form_shooting(c);
    worst = std::max(worst, std::abs(d - exact));
    rows.push_back(
        {{"c", c}, {"D", scalar(d, prov(801, 0.0, "RK4 flux form"))}, {"closed_form", exact}});
  }
  r.passed = worst <= 1e-8;
  r.metrics = {{"samples", rows},
               {"max_error", scalar(worst, prov(801, 1e-8, "|D - closed form|"))}};
  r.detail = "max |D - closed form| = " + fmt(worst);
  return r;
}

// 3. Eigencurve mu_0 on [0.5, 2.5].
inline CriterionResult criterion_3(AcceptanceContext&) {
  CriterionResult r;
  const Grid g(801);
  const auto curve = eigencurve(0.5, 2.5, 0, 21, g);
  const double cc = solve_c_crit();
  const bool one_zero = curve.sign_changes == 1 && curve.zero.has_value();
  const double zero = curve.zero.value_or(0.0);
  const double slope = curve.slope.value_or(0.0);
  r.passed = one_zero && std::abs(zero - cc) <= 1e-5 && slope > 0.0;
  const auto p = prov(801, 1e-10, "shooting bisection, 21 samples in c");
  r.metrics = {{"sign_changes", scalar(static_cast<long long>(curve.sign_changes), p)},
               {"zero", scalar(zero, p)},
               {"zero_error", scalar(std::abs(zero - cc), p)},
               {"slope", scalar(slope, prov(801, 1e-4, "centered difference in c"))}};
  r.detail = "zeros = " + std::to_string(curve.sign_changes) +
             ", zero - c_crit = " + fmt(zero - cc) + ", slope = " + fmt(slope);
  return r;
}

// 4. Sign table and node counts.
inline CriterionResult criterion_4(AcceptanceContext&) {
  CriterionResult r;
  const Grid g(801);
  const double tol = EigenvalueOptions{}.d_tol;
  const double floor = 10.0 * tol;
  bool ok = true;
  json rows = json::array();
  const auto p = prov(801, tol, "shooting bisection");
  for (double sigma : {1.6, 2.0, 3.0, 5.0}) {
    const auto bp = solve_branches(sigma);
    const auto o0 = eigenvalue(bp.c_out, 0, g);
    const auto i0 = eigenvalue(bp.c_in, 0, g);
    const auto i1 = eigenvalue(bp.c_in, 1, g);
    const bool signs = o0.mu < -floor && i0.mu > floor && i1.mu < -floor;
    const bool nodes = o0.nodes == 0 && i0.nodes == 0 && i1.nodes == 1;
    const bool parity = symmetry_defect(o0.v.values, 1.0) <= 1e-8 &&
                        symmetry_defect(i0.v.values, 1.0) <= 1e-8 &&
                        symmetry_defect(i1.v.values, -1.0) <= 1e-8;
    ok = ok && signs && nodes && parity;
    rows.push_back({{"sigma", sigma},
                    {"mu0_out", scalar(o0.mu, p)},
                    {"mu0_in", scalar(i0.mu, p)},
                    {"mu1_in", scalar(i1.mu, p)},
                    {"nodes", {o0.nodes, i0.nodes, i1.nodes}},
                    {"parity_ok", parity}});
  }
  r.passed = ok;
  r.metrics = {{"table", rows}};
  r.detail = ok ? "mu0(out) < 0 < mu0(in), mu1(in) < 0 with nodes 0/0/1 at all sigma"
                : "sign table violated";
  return r;
}

// 5. FBP force on constant profiles.
inline CriterionResult criterion_5(AcceptanceContext&) {
  CriterionResult r;
  const std::vector<std::size_t> n_eta{65, 129, 257, 513};
  bool ok = true;
  json rows = json::array();
  std::string detail;
  for (double u0 : {-0.5, 0.0, 0.5}) {
    const Profile u = Profile::from_function(Grid(11), [u0](double) { return u0; });
    const double s = u0 + 1.0;
    const double l = std::log(2.0 / s);
    const double exact = 1.0 / (s * s * l * l);
    std::vector<double> h;
    std::vector<double> err;
    for (std::size_t ne : n_eta) {
      const auto g = fbp_force(u, 2.0, ne);
      double e = 0.0;
      for (std::size_t i = 1; i + 1 < u.size(); ++i) e = std::max(e, std::abs(g[i] - exact));
      h.push_back(1.0 / static_cast<double>(ne - 1));
      err.push_back(e);
    }
    const double order = fitted_order(h, err);
    const bool pass = order >= 1.8 && err.back() <= 1e-4;
    ok = ok && pass;
    rows.push_back({{"u0", u0},
                    {"order", scalar(order, prov(11, 0.0, "least squares over n_eta 65..513"))},
                    {"finest_error", scalar(err.back(), prov(11, 1e-4, "n_eta 513"))}});
    detail += "u0=" + fmt(u0) + ": order " + fmt(order) + ", err " + fmt(err.back()) + "; ";
  }
  r.passed = ok;
  r.metrics = {{"cases", rows}};
  r.detail = detail;
  return r;
}

/// max over lambda in {L, L/2, L/4} of |u^l - u^0 - l w| / l^2 divided by the minimum.
struct LinearPrediction {
  std::vector<double> quotients;
  double spread = 0.0;
};

inline LinearPrediction linear_prediction(const ContinuationCurve& curve) {
  const double sigma = curve.sigma;
  const Profile& u0 = curve.points.front().u;
  const ForceField g = curve.model == Model::Sar ? gsar(u0, sigma) : fbp_force(u0, sigma);
  const Profile w = sensitivity(u0, g, sigma);
  LinearPrediction out;
  const double top = curve.points.back().lambda;
  for (double lam : {top, 0.5 * top, 0.25 * top}) {
    const Profile* ul = nullptr;
    for (const auto& p : curve.points) {
      if (std::abs(p.lambda - lam) <= 1e-14) ul = &p.u;
    }
    Profile solved;
    if (ul == nullptr) {
      solved = curve.model == Model::Sar ? solve_stationary_sar(sigma, lam, u0).u
                                         : solve_stationary_fbp(sigma, lam, u0).u;
      ul = &solved;
    }
    double m = 0.0;
    for (std::size_t i = 0; i < u0.size(); ++i) {
      m = std::max(m, std::abs((*ul)[i] - u0[i] - lam * w[i]));
    }
    out.quotients.push_back(m / (lam * lam));
  }
  const auto [lo, hi] = std::minmax_element(out.quotients.begin(), out.quotients.end());
  out.spread = *hi / *lo;
  return out;
}

// 6. Continuation in lambda for both models and branches.
inline CriterionResult criterion_6(AcceptanceContext& ctx) {
  CriterionResult r;
  bool ok = true;
  json rows = json::array();
  std::string detail;
  for (Model m : {Model::Sar, Model::Fbp}) {
    for (Branch b : {Branch::Outer, Branch::Inner}) {
      const auto& curve = ctx.curve(m, b);
      const double tol = m == Model::Sar ? 1e-10 : 1e-8;
      double res = 0.0;
      double sym = 0.0;
      for (const auto& p : curve.points) {
        res = std::max(res, p.residual);
        sym = std::max(sym, symmetry_defect(p.u.values));
      }
      const auto lp = linear_prediction(curve);
      const bool pass = curve.complete && res <= tol && sym <= 1e-7 && lp.spread <= 2.0;
      ok = ok && pass;
      const std::size_t n = curve.points.front().u.size();
      rows.push_back({{"model", std::string(to_string(m))},
                      {"branch", std::string(to_string(b))},
                      {"complete", curve.complete},
                      {"max_residual", scalar(res, prov(n, tol, "damped Newton"))},
                      {"symmetry_defect", scalar(sym, prov(n, 1e-7, "max |u(z) - u(-z)|"))},
                      {"linear_prediction_quotients",
                       series(lp.quotients, prov(n, 0.0, "|u - u0 - lambda w| / lambda^2"))},
                      {"linear_prediction_spread", scalar(lp.spread, prov(n, 2.0, "max/min"))}});
      detail += std::string(to_string(m)) + "/" + std::string(to_string(b)) + ": res " + fmt(res) +
                ", sym " + fmt(sym) + ", spread " + fmt(lp.spread) + "; ";
    }
  }
  r.passed = ok;
  r.metrics = {{"sigma", AcceptanceContext::kSigma}, {"curves", rows}};
  r.detail = detail;
  return r;
}

// 7. Outward deflection of the outer branch.
inline CriterionResult criterion_7(AcceptanceContext& ctx) {
  CriterionResult r;
  bool ok = true;
  json rows = json::array();
  for (Model m : {Model::Sar, Model::Fbp}) {
    const auto& curve = ctx.curve(m, Branch::Outer);
    double min_gap = std::numeric_limits<double>::infinity();
    std::size_t crossings = 0;
    for (std::size_t a = 0; a < curve.points.size(); ++a) {
      for (std::size_t b = a + 1; b < curve.points.size(); ++b) {
        const auto& lo = curve.points[a].u;
        const auto& hi = curve.points[b].u;
        for (std::size_t i = 1; i + 1 < lo.size(); ++i) min_gap = std::min(min_gap, hi[i] - lo[i]);
        crossings += intersections(hi, lo).count;
      }
    }
    const bool pass = curve.complete && min_gap > 0.0 && crossings == 0;
    ok = ok && pass;
    const std::size_t n = curve.points.front().u.size();
    rows.push_back(
        {{"model", std::string(to_string(m))},
         {"min_interior_gap", scalar(min_gap, prov(n, 0.0, "all pairs lambda_bar < lambda"))},
         {"crossings",
          scalar(static_cast<long long>(crossings), prov(n, 1e-10, "cubic bisection"))}});
  }
  r.passed = ok;
  r.metrics = {{"models", rows}};
  r.detail =
      ok ? "u^lambda > u^lambda_bar at every interior node, no crossings" : "ordering violated";
  return r;
}

// 8. Inward deflection near sigma_crit and two crossings at large sigma.
inline CriterionResult criterion_8(AcceptanceContext& ctx) {
  CriterionResult r;
  const Grid g(401);
  const double h = g.spacing();
  bool ok = true;
  json m = json::object();

  {
    const double sigma = 1.52;
    const auto u0 =
        solve_stationary_sar(sigma, 0.0, catenoid_profile(solve_branches(sigma).c_in, g)).u;
    json rows = json::array();
    for (double lam : {1e-3, 1e-2}) {
      const auto ul = solve_stationary_sar(sigma, lam, u0).u;
      double max_diff = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 1; i + 1 < g.size(); ++i) max_diff = std::max(max_diff, ul[i] - u0[i]);
      const auto ir = intersections(ul, u0);
      ok = ok && max_diff < 0.0 && ir.count == 0;
      rows.push_back(
          {{"lambda", lam},
           {"max_interior_difference", scalar(max_diff, prov(401, 1e-10, "damped Newton"))},
           {"crossings", scalar(ir.count, prov(401, 1e-10, "cubic bisection"))}});
    }
    m["sigma_1_52"] = rows;
  }
  {
    const double sigma = std::max(10.0, ctx.sigma_thresholds().sigma_upper_star_est);
    const double lam = 1e-3;
    const auto u0 =
        solve_stationary_sar(sigma, 0.0, catenoid_profile(solve_branches(sigma).c_in, g)).u;
    const auto ul = solve_stationary_sar(sigma, lam, u0).u;
    const auto w = sensitivity(u0, gsar(u0, sigma), sigma);
    const auto sp = classify_sign(w);
    const auto ir = intersections(ul, u0);
    bool near = sp.kind == SignKind::TwoSignChanges && ir.count == 2;
    if (near) {
      near = std::abs(ir.crossings[0] + sp.r0) <= 2.0 * h &&
             std::abs(ir.crossings[1] - sp.r0) <= 2.0 * h;
    }
    ok = ok && near;
    const auto p = prov(401, 2.0 * h, "cubic bisection vs sensitivity sign change");
    m["large_sigma"] = {{"sigma", sigma},
                        {"lambda", lam},
                        {"crossings", series(ir.crossings, p)},
                        {"r0", scalar(sp.r0, p)},
                        {"count", scalar(ir.count, p)}};
    r.detail = "sigma = " + fmt(sigma) + ": " + std::to_string(ir.count) + " crossings";
    if (ir.count == 2) r.detail += " at " + fmt(ir.crossings[0]) + ", " + fmt(ir.crossings[1]);
    r.detail += " vs r0 = " + fmt(sp.r0) + "; sigma = 1.52 inward";
  }
  r.passed = ok;
  r.metrics = m;
  return r;
}

// 9. Anti-maximum implications over a sigma sweep.
inline CriterionResult criterion_9(AcceptanceContext&) {
  CriterionResult r;
  const double sc = sigma_crit();
  std::vector<double> sigmas;
  for (int k = 1; k <= 20; ++k) sigmas.push_back(sc * std::pow(20.0 / sc, k / 20.0));
  struct Outcome {
    bool violated = false;
    std::string message;
    AntimaxReport rep;
  };
  const auto outcomes = parallel_map(sigmas, [](double s) {
    Outcome o;
    try {
      o.rep = antimax_crossvalidate(s);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::CriterionViolated) throw;
      o.violated = true;
      o.message = e.what();
    }
    return o;
  });
  std::size_t violations = 0;
  double worst = 0.0;
  json rows = json::array();
  const auto p = prov(8001, 1e-4, "Simpson, 40000 cells; tridiagonal sensitivity");
  for (std::size_t k = 0; k < sigmas.size(); ++k) {
    const auto& o = outcomes[k];
    if (o.violated) {
      ++violations;
      rows.push_back({{"sigma", sigmas[k]}, {"violation", o.message}});
      continue;
    }
    worst = std::max(worst, o.rep.lagrange_relative);
    rows.push_back({{"sigma", sigmas[k]},
                    {"integral", scalar(o.rep.integral, p)},
                    {"pattern", std::string(to_string(o.rep.pattern.kind))},
                    {"r0", scalar(o.rep.pattern.r0, p)},
                    {"lagrange_relative", scalar(o.rep.lagrange_relative, p)}});
  }
  r.passed = violations == 0 && worst <= 1e-4;
  r.metrics = {{"sweep", rows},
               {"violations", scalar(violations, p)},
               {"max_lagrange_relative", scalar(worst, p)}};
  r.detail =
      std::to_string(violations) + " violations over 20 sigma, max Lagrange residual " + fmt(worst);
  return r;
}

// 10. Threshold ordering.
inline CriterionResult criterion_10(AcceptanceContext& ctx) {
  CriterionResult r;
  const auto& th = ctx.sigma_thresholds();
  const double sc = sigma_crit();
  const double i1_near = I1(sc + 0.01);
  const double i1_root = I1(th.sigma_star_est);
  double a = 1.0;
  double b = 1.5;
  auto f = [](double z) { return 1.0 - z * std::tanh(z); };
  while (b - a > 1e-15) {
    const double mid = 0.5 * (a + b);
    (f(mid) > 0.0 ? a : b) = mid;
  }
  const double z0 = 0.5 * (a + b);
  const double cc = solve_c_crit();
  r.passed = th.sigma_star_est > sc && th.sigma_upper_star_est >= th.sigma_star_est &&
             i1_near > 0.0 && std::abs(z0 - cc) <= 1e-8 && std::abs(i1_root) <= 1e-8;
  const auto p = prov(0, 1e-14, "200 log-spaced samples + bisection; Simpson 20000 cells");
  r.metrics = {{"sigma_star_est", scalar(th.sigma_star_est, p)},
               {"sigma_upper_star_est", scalar(th.sigma_upper_star_est, p)},
               {"I1_near_sigma_crit", scalar(i1_near, p)},
               {"I1_at_sigma_star_est", scalar(i1_root, p)},
               {"integrand_zero_minus_c_crit", scalar(z0 - cc, prov(0, 1e-15, "bisection"))}};
  r.detail = "sigma_* est " + fmt(th.sigma_star_est) + ", sigma^* est " +
             fmt(th.sigma_upper_star_est) + ", I1(sigma_crit + 0.01) = " + fmt(i1_near);
  return r;
}

// 11. Stability dichotomy under the evolution.
inline CriterionResult criterion_11(AcceptanceContext&) {
  CriterionResult r;
  const double sigma = 2.0;
  const Grid g(401);
  const auto bp = solve_branches(sigma);
  bool ok = true;
  json rows = json::array();
  std::string detail;
  for (double lam : {0.0, 0.01}) {
    for (Branch b : {Branch::Outer, Branch::Inner}) {
      const auto ref = solve_stationary_sar(sigma, lam, catenoid_profile(bp.c(b), g)).u;
      const auto mode = leading_mode(ref, sigma, lam);
      const double amp = b == Branch::Outer ? 1e-3 : 1e-4;
      Profile u0 = ref;
      for (std::size_t i = 0; i < g.size(); ++i) u0[i] += amp * mode.v[i];
      EvolveOptions eo;
      eo.exit_radius = 1e-2;
      eo.keep_profiles = false;
      const auto tr = evolve(u0, 5.0, 1e-3, ModelParams{sigma, lam, Model::Sar, 0}, ref, eo);
      const auto rep = fit_decay_rate(tr);
      const double rel_bound =
          std::abs(rep.fitted_rate - rep.spectral_bound) / std::abs(rep.spectral_bound);
      bool pass = b == Branch::Outer
                      ? rep.verdict == Verdict::Stable && rel_bound <= 0.15
                      : rep.verdict == Verdict::Unstable && rep.growth_factor >= 10.0;
      json row = {
          {"lambda", lam},
          {"branch", std::string(to_string(b))},
          {"fitted_rate", scalar(rep.fitted_rate, prov(401, 1e-3, "dt; log-linear fit"))},
          {"spectral_bound", scalar(rep.spectral_bound, prov(401, 1e-12, "Sturm bisection"))},
          {"growth_factor",
           scalar(rep.growth_factor, prov(401, 1e-3, "max distance / initial distance"))},
          {"verdict", std::string(to_string(rep.verdict))}};
      if (lam == 0.0) {
        const double mu = sigma * sigma * eigenvalue(bp.c(b), 0, Grid(801)).mu;
        const double rel = std::abs(rep.fitted_rate - mu) / std::abs(mu);
        pass = pass && rel <= 0.10;
        row["shooting_rate"] = scalar(mu, prov(801, 1e-10, "sigma^2 mu_0 by shooting"));
        row["relative_to_shooting"] =
            scalar(rel, prov(801, 0.10, "|fitted - sigma^2 mu_0| / |sigma^2 mu_0|"));
      }
      ok = ok && pass;
      rows.push_back(row);
      detail += std::string(to_string(b)) + "@" + fmt(lam) + " rate " + fmt(rep.fitted_rate) + "; ";
    }
  }
  r.passed = ok;
  r.metrics = {{"sigma", sigma}, {"runs", rows}};
  r.detail = detail;
  return r;
}

}  // namespace detail

struct CriterionSpec {
  int id;
  const char* title;
  double budget_seconds;
  std::function<CriterionResult(AcceptanceContext&)> run;
};

inline const std::vector<CriterionSpec>& criteria() {
  static const std::vector<CriterionSpec> list{
      {1, "critical catenoid constants", 1e-3, detail::criterion_1},
      {2, "shooting vs closed form at mu = 0", 1.0, detail::criterion_2},
      {3, "eigencurve zero at c_crit", 5.0, detail::criterion_3},
      {4, "sign table of the spectrum", 10.0, detail::criterion_4},
      {5, "FBP force on constant profiles", 10.0, detail::criterion_5},
      {6, "branch continuation, both models", 60.0, detail::criterion_6},
      {7, "outward deflection of the outer branch", 10.0, detail::criterion_7},
      {8, "inward deflection and two crossings", 20.0, detail::criterion_8},
      {9, "anti-maximum cross-validation", 30.0, detail::criterion_9},
      {10, "sigma threshold ordering", 10.0, detail::criterion_10},
      {11, "stability dichotomy under the evolution", 120.0, detail::criterion_11},
  };
  return list;
}

/// Runs criteria 1-11; a criterion that throws is recorded as failed with
/// the error text. `on_result` sees each result as soon as it is available.
inline std::vector<CriterionResult> run_acceptance(
    const std::function<void(const CriterionResult&)>& on_result = {}) {
  AcceptanceContext ctx;
  std::vector<CriterionResult> out;
  for (const auto& spec : criteria()) {
    const auto t0 = std::chrono::steady_clock::now();
    CriterionResult r;
    try {
      r = spec.run(ctx);
    } catch (const std::exception& e) {
      r.passed = false;
      r.detail = std::string("error: ") + e.what();
    }
    r.id = spec.id;
    r.title = spec.title;
    r.budget_seconds = spec.budget_seconds;
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (on_result) on_result(r);
    out.push_back(std::move(r));
  }
  return out;
}

/// Deterministic summary: outcomes and metrics, no timings.
inline json acceptance_summary(const std::vector<CriterionResult>& results) {
  json crit = json::array();
  bool all = true;
  for (const auto& r : results) {
    crit.push_back(
        {{"id", r.id}, {"title", r.title}, {"passed", r.passed}, {"metrics", r.metrics}});
    all = all && r.passed;
  }
  return json{{"command", "verify"}, {"all_passed", all}, {"criteria", crit}};
}

inline std::string format_result(const CriterionResult& r) {
  char head[160];
  std::snprintf(head, sizeof head, "[%s] %2d %-42s %8.3f s (budget %g s%s)",
                r.passed ? "PASS" : "FAIL", r.id, r.title.c_str(), r.seconds, r.budget_seconds,
                r.within_budget() ? "" : ", OVER BUDGET");
  return std::string(head) + "\n       " + r.detail;
}

}  // namespace catena::cli
