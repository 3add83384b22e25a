#include <catch_amalgamated.hpp>
#include <cmath>
#include <vector>

#include "catena/dynamics.hpp"
#include "catena/geometry.hpp"
#include "catena/shooting.hpp"

using namespace catena;
using Catch::Approx;

namespace {

Profile add_mode(const Profile& u, const Profile& v, double amp) {
  Profile out = u;
  for (std::size_t i = 0; i < u.size(); ++i) out[i] += amp * v[i];
  return out;
}

Profile bump(const Grid& g) {
  return Profile::from_function(g, [](double z) { return std::cos(M_PI * z / 2.0); });
}

}  // namespace

TEST_CASE("flat film moves down at unit speed") {
  const Grid g(101);
  const double dt = 1e-3;
  const auto next = step(Profile(g), dt, ModelParams{2.0, 0.0, Model::Sar, 0});
  CHECK(next[0] == 0.0);
  CHECK(next[100] == 0.0);
  CHECK(next.at_center() == Approx(-dt).epsilon(1e-3));
  for (std::size_t i = 1; i + 1 < g.size(); ++i) CHECK(next[i] < 0.0);
}

TEST_CASE("stationary profiles are fixed points") {
  const Grid g(401);
  for (double lambda : {0.0, 0.01}) {
    const ModelParams p{2.0, lambda, Model::Sar, 0};
    const auto u = solve_stationary(2.0, lambda, catenoid_profile(solve_branches(2.0).c_out, g));
    CHECK(max_abs_diff(step(u, 1e-3, p).values, u.values) <= 1e-9);
  }
}

TEST_CASE("FBP stationary profile is a fixed point") {
  const Grid g(101);
  const ModelParams p{2.0, 0.01, Model::Fbp, 0};
  const auto u = solve_stationary_fbp(2.0, 0.01, catenoid_profile(solve_branches(2.0).c_out, g)).u;
  CHECK(max_abs_diff(step(u, 1e-3, p).values, u.values) <=
        1e-3 * 1e-8);  // dt times the FBP residual tolerance
}

TEST_CASE("scheme is first order in time") {
  const Grid g(201);
  const ModelParams p{2.0, 0.01, Model::Sar, 0};
  const auto u0 = add_mode(catenoid_profile(solve_branches(2.0).c_out, g), bump(g), 0.05);
  std::vector<Profile> end;
  for (double dt : {1e-3, 5e-4, 2.5e-4}) {
    EvolveOptions eo;
    eo.keep_profiles = false;
    end.push_back(evolve(u0, 0.1, dt, p, u0, eo).profiles.back());
  }
  const double d1 = max_abs_diff(end[0].values, end[1].values);
  const double d2 = max_abs_diff(end[1].values, end[2].values);
  CHECK(d1 / d2 == Approx(2.0).margin(0.15));
}

TEST_CASE("evolution preserves symmetry") {
  const Grid g(201);
  const ModelParams p{2.0, 0.01, Model::Sar, 0};
  const auto u0 = add_mode(catenoid_profile(solve_branches(2.0).c_out, g), bump(g), 0.05);
  const auto tr = evolve(u0, 1.0, 1e-3, p, u0);
  REQUIRE(tr.profiles.size() == tr.times.size());
  for (std::size_t k = 1; k < tr.times.size(); ++k) CHECK(tr.times[k] > tr.times[k - 1]);
  double worst = 0.0;
  for (const auto& u : tr.profiles) worst = std::max(worst, symmetry_defect(u.values));
  CHECK(worst <= 1e-8);
  CHECK(tr.event == EventKind::None);
  CHECK(tr.times.back() == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("outer branch decays at the spectral rate") {
  const double sigma = 2.0;
  const Grid g(401);
  const auto bp = solve_branches(sigma);
  for (double lambda : {0.0, 0.01}) {
    const auto ref = solve_stationary(sigma, lambda, catenoid_profile(bp.c_out, g));
    const auto mode = leading_mode(ref, sigma, lambda);
    CHECK(mode.mu < 0.0);
    CHECK(max_abs(mode.v.values) == Approx(1.0));
    EvolveOptions eo;
    eo.keep_profiles = false;
    const auto tr = evolve(add_mode(ref, mode.v, 1e-3), 5.0, 1e-3,
                           ModelParams{sigma, lambda, Model::Sar, 0}, ref, eo);
    const auto rep = fit_decay_rate(tr);
    CHECK(rep.verdict == Verdict::Stable);
    CHECK(rep.fitted_rate < 0.0);
    CHECK(std::abs(rep.fitted_rate - rep.spectral_bound) <= 0.15 * std::abs(rep.spectral_bound));
    CHECK(rep.fit_samples >= 20);
    // Monotone decay until the rounding floor, ending below 1e-6.
    for (std::size_t k = 1; k < tr.norms.size() && tr.norms[k] > 1e-10; ++k)
      CHECK(tr.norms[k] < tr.norms[k - 1]);
    CHECK(tr.norms.back() < 1e-6);
    if (lambda == 0.0) {
      const double mu = sigma * sigma * eigenvalue(bp.c_out, 0, Grid(801)).mu;
      CHECK(std::abs(rep.fitted_rate - mu) <= 0.10 * std::abs(mu));
    }
  }
}

TEST_CASE("inner branch is unstable") {
  const double sigma = 2.0;
  const Grid g(401);
  const auto bp = solve_branches(sigma);
  for (double lambda : {0.0, 0.01}) {
    const auto ref = solve_stationary(sigma, lambda, catenoid_profile(bp.c_in, g));
    const auto mode = leading_mode(ref, sigma, lambda);
    CHECK(mode.mu > 0.0);
    EvolveOptions eo;
    eo.exit_radius = 1e-2;
    const auto tr = evolve(add_mode(ref, mode.v, 1e-4), 5.0, 1e-3,
                           ModelParams{sigma, lambda, Model::Sar, 0}, ref, eo);
    CHECK(tr.event == EventKind::LeftBall);
    const auto rep = fit_decay_rate(tr);
    CHECK(rep.verdict == Verdict::Unstable);
    CHECK(rep.growth_factor >= 10.0);
    CHECK(rep.fitted_rate > 0.0);
    if (lambda == 0.0) {
      const double mu = sigma * sigma * eigenvalue(bp.c_in, 0, Grid(801)).mu;
      CHECK(std::abs(rep.fitted_rate - mu) <= 0.15 * mu);
    }
  }
}

TEST_CASE("fitted rate sign follows mu_0 along the branches") {
  const Grid g(201);
  for (double sigma : {1.8, 3.0}) {
    const auto bp = solve_branches(sigma);
    for (Branch b : {Branch::Outer, Branch::Inner}) {
      const double mu = eigenvalue(bp.c(b), 0, Grid(401)).mu;
      const auto ref = solve_stationary(sigma, 0.0, catenoid_profile(bp.c(b), g));
      const auto mode = leading_mode(ref, sigma, 0.0);
      EvolveOptions eo;
      eo.exit_radius = 1e-2;
      eo.keep_profiles = false;
      const auto tr = evolve(add_mode(ref, mode.v, 1e-4), 5.0, 2e-3,
                             ModelParams{sigma, 0.0, Model::Sar, 0}, ref, eo);
      const auto rep = fit_decay_rate(tr);
      CHECK((rep.fitted_rate > 0.0) == (mu > 0.0));
      CHECK((rep.verdict == Verdict::Unstable) == (mu > 0.0));
    }
  }
}

TEST_CASE("large inward perturbation of the inner branch touches down") {
  const Grid g(201);
  const auto ref = catenoid_profile(solve_branches(2.0).c_in, g);
  const auto u0 = add_mode(ref, bump(g), -0.2);
  const auto tr = evolve(u0, 5.0, 1e-3, ModelParams{2.0, 0.0, Model::Sar, 0}, ref);
  CHECK(tr.event == EventKind::Touchdown);
  CHECK(tr.event_time > 0.0);
  CHECK(tr.event_time < 5.0);
  try {
    Profile u = u0;
    for (int k = 0; k < 100000; ++k) u = step(u, 1e-3, ModelParams{2.0, 0.0, Model::Sar, 0});
    FAIL("expected Touchdown");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Touchdown);
  }
}

TEST_CASE("strong forcing near the cylinder hits the ceiling") {
  const Grid g(101);
  const auto u0 = Profile::from_function(g, [](double z) { return 0.99 * (1.0 - z * z * z * z); });
  try {
    step(u0, 1e-3, ModelParams{2.0, 1.0, Model::Sar, 0});
    FAIL("expected CeilingContact");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::CeilingContact);
  }
  const auto tr = evolve(u0, 1.0, 1e-3, ModelParams{2.0, 1.0, Model::Sar, 0}, u0);
  CHECK(tr.event == EventKind::CeilingContact);
}

TEST_CASE("decay fits need enough signal") {
  const Grid g(201);
  const double sigma = 2.0;
  const auto ref = solve_stationary(sigma, 0.0, catenoid_profile(solve_branches(sigma).c_out, g));
  const auto mode = leading_mode(ref, sigma, 0.0);
  const ModelParams p{sigma, 0.0, Model::Sar, 0};
  auto kind_of = [&](double T) {
    try {
      fit_decay_rate(evolve(add_mode(ref, mode.v, 1e-3), T, 1e-3, p, ref));
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::InvalidConfig;
  };
  CHECK(kind_of(0.01) == ErrorKind::InsufficientDecay);
  CHECK(kind_of(0.2) == ErrorKind::InsufficientDecay);
  CHECK_THROWS_AS(fit_decay_rate(evolve(ref, 0.1, 1e-3, p, ref)), Error);
}

TEST_CASE("invalid time steps") {
  const Grid g(51);
  const ModelParams p{2.0, 0.0, Model::Sar, 0};
  CHECK_THROWS_AS(step(Profile(g), 0.0, p), Error);
  CHECK_THROWS_AS(evolve(Profile(g), -1.0, 1e-3, p, Profile(g)), Error);
  CHECK_THROWS_AS(evolve(Profile(g), 1.0, 1e-3, p, Profile(Grid(11))), Error);
}

TEST_CASE("frozen diffusion is the principal part of the jacobian") {
  const Grid g(101);
  const auto u = catenoid_profile(solve_branches(2.0).c_in, g);
  const auto l = frozen_diffusion(u, 2.0);
  const auto j = capillary_jacobian(u, 2.0);
  for (std::size_t k = 0; k < l.size(); ++k) {
    CHECK(l.lower[k] == j.lower[k]);
    CHECK(l.upper[k] == j.upper[k]);
    CHECK(j.diag[k] - l.diag[k] == Approx(1.0 / std::pow(u[k + 1] + 1.0, 2)).epsilon(1e-12));
  }
}
