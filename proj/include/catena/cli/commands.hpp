#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "catena/cli/acceptance.hpp"
#include "catena/cli/config.hpp"
#include "catena/cli/output.hpp"
#include "catena/continuation.hpp"
#include "catena/deflection.hpp"
#include "catena/dynamics.hpp"
#include "catena/fbp_solver.hpp"
#include "catena/geometry.hpp"
#include "catena/potential.hpp"
#include "catena/sar_solver.hpp"
#include "catena/shooting.hpp"

namespace catena::cli {

namespace fs = std::filesystem;

enum ExitCode : int { kOk = 0, kCriteriaFailed = 1, kConfig = 2, kDomain = 3, kNumerical = 4 };

inline int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidConfig:
      return kConfig;
    case ErrorKind::NoSolution:
    case ErrorKind::SingularGap:
    case ErrorKind::Touchdown:
    case ErrorKind::CeilingContact:
      return kDomain;
    default:
      return kNumerical;
  }
}

namespace detail {

inline json provenance(const RunConfig& c, double tol, const std::string& method) {
  return json{{"grid_n", c.grid_n}, {"tol", tol}, {"method", method}};
}

inline json config_json(const RunConfig& c) {
  return json{
      {"command", to_string(c.command)},
      {"sigma", c.sigma},
      {"lambda", {{"start", c.lambda.start}, {"stop", c.lambda.stop}, {"steps", c.lambda.steps}}},
      {"model", std::string(to_string(c.model))},
      {"branch", std::string(to_string(c.branch))},
      {"grid_n", c.grid_n},
      {"n_eta", c.n_eta},
      {"newton_tol", c.newton_tol},
      {"fbp_tol", c.fbp_tol},
      {"eig_tol", c.eig_tol},
      {"dt", c.dt},
      {"t_end", c.t_end},
      {"amplitude", c.amplitude},
      {"perturbation", c.perturbation},
      {"seed", c.seed}};
}

inline NewtonOptions newton_for(const RunConfig& c) {
  NewtonOptions o;
  o.tol = c.model == Model::Sar ? c.newton_tol : c.fbp_tol;
  return o;
}

inline NewtonResult stationary(const RunConfig& c, double lambda, const Profile& init) {
  return solve_stationary_model(ModelParams{c.sigma, lambda, c.model, c.n_eta}, init,
                                newton_for(c));
}

/// Stationary solution of the configured branch at lambda, continued from the
/// catenoid in uniform steps of at most 0.005.
inline Profile branch_solution(const RunConfig& c, double lambda, const Grid& g) {
  const auto bp = solve_branches(c.sigma);
  Profile u = stationary(c, 0.0, catenoid_profile(bp.c(c.branch), g)).u;
  const auto steps = static_cast<std::size_t>(std::ceil(lambda / 0.005));
  for (std::size_t k = 1; k <= steps; ++k) {
    u = stationary(c, lambda * static_cast<double>(k) / static_cast<double>(steps), u).u;
  }
  return u;
}

/// Uniform double in [-1, 1) from the top 53 bits, independent of the
/// standard library's distribution implementations.
inline double unit_symmetric(std::mt19937_64& rng) {
  return 2.0 * static_cast<double>(rng() >> 11) * 0x1.0p-53 - 1.0;
}

inline json run_catenoid(const RunConfig& c) {
  const Grid g(c.grid_n);
  const auto bp = solve_branches(c.sigma);
  const auto uo = catenoid_profile(bp.c_out, g);
  const auto ui = catenoid_profile(bp.c_in, g);
  Table t({"z", "u_out", "u_in"});
  for (std::size_t i = 0; i < g.size(); ++i) t.add({g.z(i), uo[i], ui[i]});
  t.write(fs::path(c.output) / "catenoid.tsv");
  const auto p = provenance(c, 1e-13, "bracketed Newton on cosh(c)/c = sigma");
  const auto pe = provenance(c, 0.0, "centered differences + Simpson");
  return {{"c_out", scalar(bp.c_out, p)},
          {"c_in", scalar(bp.c_in, p)},
          {"c_crit", scalar(bp.c_crit, p)},
          {"sigma_crit", scalar(bp.sigma_crit, p)},
          {"energy_out", scalar(surface_energy(uo, c.sigma), pe)},
          {"energy_in", scalar(surface_energy(ui, c.sigma), pe)}};
}

inline json run_eigencurve(const RunConfig& c) {
  const Grid g(c.grid_n);
  const auto curve = eigencurve(c.c_lo, c.c_hi, c.eigen_index, c.samples, g);
  Table t({"c", "mu"});
  for (const auto& p : curve.points) t.add({p.c, p.mu});
  t.write(fs::path(c.output) / "eigencurve.tsv");
  const auto p = provenance(c, c.eig_tol, "shooting + oscillation-count bisection");
  json out = {{"index", curve.index},
              {"sign_changes", scalar(static_cast<long long>(curve.sign_changes), p)}};
  if (curve.zero) out["zero"] = scalar(*curve.zero, p);
  if (curve.slope)
    out["slope"] = scalar(*curve.slope, provenance(c, 1e-4, "centered difference in c"));

  if (c.sigma >= sigma_crit()) {
    const auto bp = solve_branches(c.sigma);
    EigenvalueOptions eo;
    eo.d_tol = c.eig_tol;
    out["sign_table"] = {{"sigma", c.sigma},
                         {"mu0_out", scalar(eigenvalue(bp.c_out, 0, g, eo).mu, p)},
                         {"mu0_in", scalar(eigenvalue(bp.c_in, 0, g, eo).mu, p)},
                         {"mu1_in", scalar(eigenvalue(bp.c_in, 1, g, eo).mu, p)}};
  }
  return out;
}

inline json run_continue(const RunConfig& c) {
  const Grid g(c.grid_n);
  if (c.lambda.start != 0.0) {
    throw Error(ErrorKind::InvalidConfig, "lambda: continuation starts at 0");
  }
  ContinuationOptions opt;
  opt.newton = newton_for(c);
  opt.allow_partial = true;
  const auto curve =
      c.model == Model::Sar
          ? continue_in_lambda(c.sigma, c.branch, c.lambda.stop, c.lambda.steps, g, opt)
          : continue_in_lambda_fbp(c.sigma, c.branch, c.lambda.stop, c.lambda.steps, g,
                                   FbpOptions{opt.newton, c.n_eta}, opt);
  Table summary({"lambda", "u_center", "residual", "iterations"});
  std::vector<std::string> cols{"z"};
  for (std::size_t k = 0; k < curve.points.size(); ++k) cols.push_back("u_" + std::to_string(k));
  Table profiles(cols);
  for (const auto& p : curve.points) {
    summary.add({p.lambda, p.u.at_center(), p.residual, static_cast<double>(p.iterations)});
  }
  for (std::size_t i = 0; i < g.size(); ++i) {
    std::vector<double> row{g.z(i)};
    for (const auto& p : curve.points) row.push_back(p.u[i]);
    profiles.add(row);
  }
  summary.write(fs::path(c.output) / "continuation.tsv");
  profiles.write(fs::path(c.output) / "profiles.tsv");
  double res = 0.0;
  for (const auto& p : curve.points) res = std::max(res, p.residual);
  const auto p = provenance(c, opt.newton.tol, "damped Newton, natural continuation");
  return {{"complete", curve.complete},
          {"fold_estimate", scalar(curve.fold_estimate, p)},
          {"points", scalar(curve.points.size(), p)},
          {"max_residual", scalar(res, p)},
          {"u_center_final", scalar(curve.points.back().u.at_center(), p)}};
}

inline json run_deflect(const RunConfig& c) {
  const Grid g(c.grid_n);
  const auto rep = deflect(c.sigma, c.branch, c.model, g, c.n_eta);
  Table t({"z", "sensitivity"});
  for (std::size_t i = 0; i < g.size(); ++i) t.add({g.z(i), rep.sensitivity[i]});
  t.write(fs::path(c.output) / "sensitivity.tsv");
  const auto p = provenance(c, 0.0, "tridiagonal solve DF w = -g");
  const auto pq = provenance(c, 1e-8, "Simpson, 20000 cells");
  json out = {{"sign_pattern", std::string(to_string(rep.sign_pattern.kind))},
              {"end_slopes", {scalar(rep.end_slopes.first, p), scalar(rep.end_slopes.second, p)}},
              {"criterion_integral", scalar(rep.criterion_integral, pq)},
              {"I1", scalar(rep.I1, pq)},
              {"I4", scalar(rep.I4, pq)}};
  if (rep.sign_pattern.kind == SignKind::TwoSignChanges) {
    out["r0"] = scalar(rep.sign_pattern.r0, p);
    out["negative_inside"] = rep.sign_pattern.center_negative;
  }
  return out;
}

inline json run_thresholds(const RunConfig& c) {
  const auto th = find_sigma_thresholds();
  Table t({"sigma", "I1", "I4"});
  for (std::size_t k = 0; k < th.i1_sweep.size(); ++k) {
    t.add({th.i1_sweep[k].first, th.i1_sweep[k].second, th.i4_sweep[k].second});
  }
  t.write(fs::path(c.output) / "thresholds.tsv");
  const json p = {
      {"samples", th.i1_sweep.size()}, {"tol", 1e-14}, {"method", "log-spaced scan + bisection"}};
  return {{"sigma_star_est", scalar(th.sigma_star_est, p)},
          {"sigma_upper_star_est", scalar(th.sigma_upper_star_est, p)},
          {"sigma_crit", scalar(sigma_crit(), p)}};
}

inline json run_simulate(const RunConfig& c) {
  const Grid g(c.grid_n);
  const double lambda = c.lambda.stop;
  const auto ref = branch_solution(c, lambda, g);
  Profile u0 = ref;
  const auto mode = leading_mode(ref, c.sigma, lambda);
  if (c.perturbation == "mode") {
    for (std::size_t i = 0; i < g.size(); ++i) u0[i] += c.amplitude * mode.v[i];
  } else {
    std::mt19937_64 rng(c.seed);
    std::vector<double> coef(8);
    for (double& a : coef) a = unit_symmetric(rng);
    std::vector<double> pert(g.size(), 0.0);
    for (std::size_t i = 0; i < g.size(); ++i) {
      for (std::size_t k = 0; k < coef.size(); ++k) {
        pert[i] += coef[k] * std::sin(0.5 * static_cast<double>(k + 1) * M_PI * (g.z(i) + 1.0)) /
                   static_cast<double>(k + 1);
      }
    }
    const double scale = c.amplitude / max_abs(pert);
    for (std::size_t i = 0; i < g.size(); ++i) u0[i] += scale * pert[i];
  }
  EvolveOptions eo;
  eo.keep_profiles = false;
  const auto tr =
      evolve(u0, c.t_end, c.dt, ModelParams{c.sigma, lambda, c.model, c.n_eta}, ref, eo);
  Table t({"t", "distance"});
  for (std::size_t k = 0; k < tr.times.size(); ++k) t.add({tr.times[k], tr.norms[k]});
  t.write(fs::path(c.output) / "trajectory.tsv");
  const auto p = provenance(c, c.dt, "semi-implicit Euler, log-linear fit");
  json out = {{"event", std::string(to_string(tr.event))},
              {"spectral_bound", scalar(mode.mu, provenance(c, 1e-12, "Sturm bisection"))},
              {"final_distance", scalar(tr.norms.back(), p)}};
  if (tr.event != EventKind::None && tr.event != EventKind::LeftBall) {
    out["event_time"] = scalar(tr.event_time, p);
  }
  try {
    const auto rep = fit_decay_rate(tr);
    out["fitted_rate"] = scalar(rep.fitted_rate, p);
    out["growth_factor"] = scalar(rep.growth_factor, p);
    out["verdict"] = std::string(to_string(rep.verdict));
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::InsufficientDecay) throw;
    out["fit_error"] = e.what();
  }
  return out;
}

inline json run_potential(const RunConfig& c) {
  const Grid g(c.grid_n);
  const auto u = branch_solution(c, c.lambda.stop, g);
  const auto pg = solve_potential(u, c.sigma, c.n_eta);
  const auto gf = electrostatic_force(u, pg, c.sigma);
  const auto gs = gsar(u, c.sigma);
  Table field({"z", "eta", "r", "psi"});
  for (std::size_t i = 0; i < pg.n_z; ++i) {
    for (std::size_t j = 0; j < pg.n_eta; ++j)
      field.add({g.z(i), pg.eta(j), pg.r(i, j), pg.at(i, j)});
  }
  Table force({"z", "u", "g_fbp", "g_sar"});
  for (std::size_t i = 0; i < g.size(); ++i) force.add({g.z(i), u[i], gf[i], gs[i]});
  field.write(fs::path(c.output) / "potential.tsv");
  force.write(fs::path(c.output) / "force.tsv");
  json p = provenance(c, 1e-10, "9-point mapped stencil, sparse LU");
  p["n_eta"] = pg.n_eta;
  double psi_min = 1.0;
  double psi_max = 0.0;
  for (double v : pg.psi) {
    psi_min = std::min(psi_min, v);
    psi_max = std::max(psi_max, v);
  }
  return {{"linear_residual", scalar(pg.linear_residual, p)},
          {"psi_min", scalar(psi_min, p)},
          {"psi_max", scalar(psi_max, p)},
          {"corner_roughness", scalar(corner_flux_roughness(gf), p)},
          {"force_center_fbp", scalar(gf[g.mid()], p)},
          {"force_center_sar", scalar(gs[g.mid()], p)}};
}

/// Runs criteria 1-11, prints the table, and writes summary.json. If a
/// summary from an earlier run is already in the output directory, the new
/// one is compared byte for byte (criterion 12).
inline int run_verify(const RunConfig& c, std::ostream& os) {
  const auto results =
      run_acceptance([&os](const CriterionResult& r) { os << format_result(r) << std::endl; });
  const auto summary = acceptance_summary(results);
  const std::string text = summary.dump(2) + "\n";
  const fs::path path = fs::path(c.output) / "summary.json";
  std::optional<std::string> previous;
  if (fs::exists(path)) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    previous = ss.str();
  }
  write_atomic(path, text);
  bool ok = summary["all_passed"].get<bool>();
  if (previous) {
    const bool same = *previous == text;
    os << "[" << (same ? "PASS" : "FAIL") << "] 12 determinism of summary.json"
       << "\n       " << (same ? "identical to the previous run" : "differs from the previous run")
       << std::endl;
    ok = ok && same;
  } else {
    os << "[SKIP] 12 determinism of summary.json\n       no previous summary.json in " << c.output
       << "; run verify again to compare" << std::endl;
  }
  return ok ? kOk : kCriteriaFailed;
}

}  // namespace detail

/// Executes one command. Errors propagate as catena::Error.
inline int run(const RunConfig& c, std::ostream& os = std::cout) {
  fs::create_directories(c.output);
  if (c.command == Command::Verify) return detail::run_verify(c, os);
  json result;
  switch (c.command) {
    case Command::Catenoid:
      result = detail::run_catenoid(c);
      break;
    case Command::Eigencurve:
      result = detail::run_eigencurve(c);
      break;
    case Command::Continue:
      result = detail::run_continue(c);
      break;
    case Command::Deflect:
      result = detail::run_deflect(c);
      break;
    case Command::Thresholds:
      result = detail::run_thresholds(c);
      break;
    case Command::Simulate:
      result = detail::run_simulate(c);
      break;
    case Command::Potential:
      result = detail::run_potential(c);
      break;
    case Command::Verify:
      break;
  }
  json summary = {{"config", detail::config_json(c)}, {"results", result}};
  write_json(fs::path(c.output) / "summary.json", summary);
  os << summary.dump(2) << std::endl;
  return kOk;
}

/// Parses arguments, runs, and maps errors onto exit codes.
inline int main_entry(int argc, const char* const* argv, std::ostream& os = std::cout,
                      std::ostream& err = std::cerr) {
  try {
    const auto parsed = parse_args(argc, argv);
    if (parsed.help_text) {
      os << *parsed.help_text;
      return kOk;
    }
    return run(parsed.config, os);
  } catch (const Error& e) {
    err << "catena: " << e.what() << std::endl;
    return exit_code(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    err << "catena: " << e.what() << std::endl;
    return kConfig;
  }
}

}  // namespace catena::cli
