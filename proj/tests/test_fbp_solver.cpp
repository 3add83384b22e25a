#include <catch_amalgamated.hpp>
#include <cmath>
#include <vector>

#include "catena/fbp_solver.hpp"
#include "catena/geometry.hpp"
#include "catena/potential.hpp"
#include "catena/sar_solver.hpp"

using namespace catena;
using Catch::Approx;

namespace {

Profile constant(const Grid& g, double u0) {
  return Profile::from_function(g, [u0](double) { return u0; });
}

double radial_force(double u0) {
  const double s = u0 + 1.0;
  const double l = std::log(2.0 / s);
  return 1.0 / (s * s * l * l);
}

}  // namespace

TEST_CASE("boundary data") {
  CHECK(boundary_data(0.0, 1.0) == 0.0);
  CHECK(boundary_data(0.3, 2.0) == Approx(1.0).epsilon(1e-15));
  CHECK(boundary_data(0.0, std::sqrt(2.0)) == Approx(0.5).epsilon(1e-15));
  CHECK_THROWS_AS(boundary_data(-1.0, 1.0), Error);
  const auto u = Profile::from_function(Grid(5), [](double z) { return 0.5 * (1.0 - z * z); });
  CHECK(boundary_data(u, 1.0, 1.5) == Approx(std::log(1.5) / std::log(2.0)).epsilon(1e-14));
  // z = 0.25 lies midway between nodes with u = 0.375 and 0.5.
  CHECK(boundary_data(u, 0.25, 1.6) == Approx(boundary_data(0.4375, 1.6)).epsilon(1e-14));
}

TEST_CASE("radial potential is recovered on constant profiles") {
  for (double u0 : {-0.5, 0.0, 0.5}) {
    std::vector<double> h, err;
    for (std::size_t ne : {17, 33, 65}) {
      const auto pg = solve_potential(constant(Grid(21), u0), 2.0, ne);
      double e = 0.0;
      for (std::size_t i = 0; i < pg.n_z; ++i) {
        for (std::size_t j = 0; j < pg.n_eta; ++j) {
          e = std::max(e, std::abs(pg.at(i, j) - boundary_data(u0, pg.r(i, j))));
        }
      }
      h.push_back(1.0 / static_cast<double>(ne - 1));
      err.push_back(e);
      CHECK(pg.linear_residual <= 1e-10);
    }
    CHECK(err.back() <= 1e-4);
    CHECK(fitted_order(h, err) >= 1.8);
  }
}

TEST_CASE("force on constant profiles") {
  for (double u0 : {-0.5, 0.0, 0.5}) {
    std::vector<double> h, err;
    for (std::size_t ne : {65, 129, 257}) {
      const auto u = constant(Grid(11), u0);
      const auto g = electrostatic_force(u, solve_potential(u, 2.0, ne), 2.0);
      h.push_back(1.0 / static_cast<double>(ne - 1));
      err.push_back(std::abs(g[5] - radial_force(u0)));
    }
    CHECK(err.back() <= 1e-4);
    CHECK(fitted_order(h, err) >= 1.8);
  }
}

TEST_CASE("potential obeys the maximum principle and the boundary data") {
  const double sigma = 2.0;
  const Grid g(101);
  const auto u = catenoid_profile(solve_branches(sigma).c_in, g);
  const auto pg = solve_potential(u, sigma);
  CHECK(pg.n_eta == default_n_eta(101));
  for (double p : pg.psi) {
    CHECK(p >= -1e-12);
    CHECK(p <= 1.0 + 1e-12);
  }
  for (std::size_t i = 0; i < pg.n_z; ++i) {
    CHECK(pg.at(i, 0) == 0.0);
    CHECK(pg.at(i, pg.n_eta - 1) == 1.0);
  }
  for (std::size_t j = 0; j < pg.n_eta; ++j) {
    CHECK(pg.at(0, j) == Approx(std::log(pg.r(0, j)) / std::log(2.0)).margin(1e-15));
    // mirror symmetry in z
    CHECK(std::abs(pg.at(3, j) - pg.at(pg.n_z - 4, j)) <= 1e-12);
  }
  CHECK_THROWS_AS(solve_potential(u, sigma, 3), Error);
}

TEST_CASE("FBP force is positive and symmetric") {
  const double sigma = 2.0;
  const Grid g(101);
  for (Branch b : {Branch::Outer, Branch::Inner}) {
    const auto u = catenoid_profile(solve_branches(sigma).c(b), g);
    const auto f = fbp_force(u, sigma);
    for (double x : f.values) CHECK(x > 0.0);
    CHECK(symmetry_defect(f.values) <= 1e-10);
    CHECK(std::isfinite(corner_flux_roughness(f)));
  }
}

TEST_CASE("FBP and SAR forces are close for slender gaps") {
  // For the flat film the two forces agree up to discretization error.
  const Grid g(101);
  const auto f = fbp_force(Profile(g), 3.0, 129);
  const auto s = gsar(Profile(g), 3.0);
  CHECK(std::abs(f[50] - s[50]) <= 1e-3 * s[50]);
  // On a curved film they differ: the SAR force drops the fringe field.
  const auto u = catenoid_profile(solve_branches(3.0).c_out, g);
  const auto fc = fbp_force(u, 3.0);
  const auto sc = gsar(u, 3.0);
  CHECK(max_abs_diff(fc.values, sc.values) > 1e-3);
}

TEST_CASE("FBP residual at lambda = 0 is the capillary residual") {
  const Grid g(51);
  const auto u = catenoid_profile(solve_branches(2.0).c_out, g);
  const auto a = fbp_residual(u, 2.0, 0.0);
  const auto b = residual(u, 2.0, 0.0);
  CHECK(max_abs_diff(a, b) == 0.0);
}

TEST_CASE("FBP Newton from a bumped catenoid") {
  const double sigma = 2.0;
  const Grid g(101);
  const auto cat = catenoid_profile(solve_branches(sigma).c_out, g);
  const auto base = solve_stationary_fbp(sigma, 0.0, cat);
  Profile init = cat;
  for (std::size_t i = 0; i < g.size(); ++i) init[i] += 1e-3 * std::cos(M_PI * g.z(i) / 2.0);
  const auto back = solve_stationary_fbp(sigma, 0.0, init);
  CHECK(max_abs_diff(back.u.values, base.u.values) <= 1e-7);

  const auto res = solve_stationary_fbp(sigma, 0.02, base.u);
  CHECK(res.residual <= 1e-8);
  CHECK(symmetry_defect(res.u.values) <= 1e-7);
  for (std::size_t i = 1; i + 1 < g.size(); ++i) CHECK(res.u[i] > base.u[i]);
}

TEST_CASE("FBP branch is tangent to its linear prediction") {
  const double sigma = 2.0;
  const Grid g(101);
  const auto cat = catenoid_profile(solve_branches(sigma).c_out, g);
  const auto u0 = solve_stationary_fbp(sigma, 0.0, cat).u;
  const double l1 = 0.02, l2 = 0.01;
  const auto u1 = solve_stationary_fbp(sigma, l1, u0).u;
  const auto u2 = solve_stationary_fbp(sigma, l2, u0).u;
  // Second-order difference quotient removes the linear part.
  double q1 = 0.0, q2 = 0.0;
  const auto u4 = solve_stationary_fbp(sigma, 2.0 * l1, u0).u;
  for (std::size_t i = 0; i < g.size(); ++i) {
    q1 = std::max(q1, std::abs(u4[i] - 2.0 * u1[i] + u0[i]) / (l1 * l1));
    q2 = std::max(q2, std::abs(u1[i] - 2.0 * u2[i] + u0[i]) / (l2 * l2));
  }
  CHECK(q1 > 0.0);
  CHECK(q2 / q1 == Approx(1.0).margin(0.2));
}

TEST_CASE("FBP continuation on both branches") {
  for (Branch b : {Branch::Outer, Branch::Inner}) {
    const auto curve = continue_in_lambda_fbp(2.0, b, 0.05, 5, Grid(101));
    CHECK(curve.complete);
    CHECK(curve.model == Model::Fbp);
    REQUIRE(curve.points.size() == 6);
    for (std::size_t k = 0; k < curve.points.size(); ++k) {
      CHECK(curve.points[k].residual <= 1e-8);
      CHECK(symmetry_defect(curve.points[k].u.values) <= 1e-7);
      if (k > 0 && b == Branch::Outer) {
        CHECK(curve.points[k].u.at_center() > curve.points[k - 1].u.at_center());
      }
    }
  }
}

TEST_CASE("model dispatch") {
  const Grid g(51);
  const auto u = catenoid_profile(solve_branches(2.0).c_out, g);
  ModelParams p{2.0, 0.01, Model::Sar, 0};
  CHECK(max_abs_diff(model_force(u, p).values, gsar(u, 2.0).values) == 0.0);
  p.model = Model::Fbp;
  CHECK(max_abs_diff(model_force(u, p).values, fbp_force(u, 2.0).values) == 0.0);
  CHECK(max_abs_diff(model_residual(u, p), fbp_residual(u, 2.0, 0.01)) == 0.0);
}
