#include <catch_amalgamated.hpp>
#include <cmath>
#include <span>
#include <vector>

#include "catena/geometry.hpp"
#include "catena/shooting.hpp"

using namespace catena;
using Catch::Approx;

namespace {

// At mu = 0 the linearization has the Jacobi fields sinh(cz) and
// cz sinh(cz) - cosh(cz); D is the combination with v(-1) = 0, v'(-1) = 1.
double oracle_D(double c) {
  auto y1 = [c](double z) { return std::sinh(c * z); };
  auto d1 = [c](double z) { return c * std::cosh(c * z); };
  auto y2 = [c](double z) { return c * z * std::sinh(c * z) - std::cosh(c * z); };
  auto d2 = [c](double z) { return c * c * z * std::cosh(c * z); };
  // [y1 y2; d1 d2] (a, b) = (0, 1) at z = -1.
  const double det = y1(-1) * d2(-1) - y2(-1) * d1(-1);
  const double a = -y2(-1) / det;
  const double b = y1(-1) / det;
  return a * y1(1) + b * y2(1);
}

}  // namespace

TEST_CASE("D(c, 0) matches the closed form") {
  const Grid g(801);
  for (double c : {0.6, 1.0, solve_c_crit(), 2.0, 3.0}) {
    CHECK(std::abs(shoot(c, 0.0, g).D - oracle_D(c)) <= 1e-8);
  }
  CHECK(std::abs(shoot(solve_c_crit(), 0.0, g).D) <= 1e-8);
}

TEST_CASE("RK4 shooting converges at fourth order") {
  const double c = 2.0;
  const double e1 = std::abs(shoot(c, 0.0, Grid(51)).D - oracle_D(c));
  const double e2 = std::abs(shoot(c, 0.0, Grid(101)).D - oracle_D(c));
  CHECK(e1 / e2 >= 12.0);
}

TEST_CASE("shooting solution starts from the normalized data") {
  const auto s = shoot(1.5, -0.3, Grid(101));
  CHECK(s.v.front() == 0.0);
  CHECK(s.dv.front() == 1.0);
  CHECK(s.v.size() == 101);
  CHECK(s.D == s.v.back());
}

TEST_CASE("mu_0 vanishes at c_crit with the Jacobi field as eigenfunction") {
  const Grid g(801);
  const double c = solve_c_crit();
  const auto p = eigenvalue(c, 0, g);
  CHECK(std::abs(p.mu) <= 1e-6);
  CHECK(p.nodes == 0);
  auto jacobi = Profile::from_function(
      g, [c](double z) { return std::cosh(c * z) - c * z * std::sinh(c * z); });
  const double s = max_abs(jacobi.values);
  for (double& x : jacobi.values) x /= s;
  CHECK(max_abs_diff(p.v.values, jacobi.values) <= 1e-6);
}

TEST_CASE("sign table on both branches") {
  const Grid g(801);
  for (double sigma : {1.6, 2.0, 3.0, 5.0}) {
    const auto bp = solve_branches(sigma);
    const auto o0 = eigenvalue(bp.c_out, 0, g);
    const auto i0 = eigenvalue(bp.c_in, 0, g);
    const auto i1 = eigenvalue(bp.c_in, 1, g);
    CHECK(o0.mu < -1e-9);
    CHECK(i0.mu > 1e-9);
    CHECK(i1.mu < -1e-9);
    CHECK(o0.nodes == 0);
    CHECK(i0.nodes == 0);
    CHECK(i1.nodes == 1);
    CHECK(symmetry_defect(o0.v.values) <= 1e-8);
    CHECK(symmetry_defect(i0.v.values) <= 1e-8);
    CHECK(symmetry_defect(i1.v.values, -1.0) <= 1e-8);
    CHECK(o0.v[0] == 0.0);
    CHECK(std::abs(o0.v[g.size() - 1]) <= 1e-8);
  }
}

TEST_CASE("eigenvalues are ordered with one node per index") {
  const Grid g(801);
  double prev = 1e300;
  for (std::size_t n = 0; n < 4; ++n) {
    const auto p = eigenvalue(1.8, n, g);
    CHECK(p.mu < prev);
    CHECK(p.nodes == n);
    CHECK(symmetry_defect(p.v.values, n % 2 == 0 ? 1.0 : -1.0) <= 1e-7);
    prev = p.mu;
  }
}

TEST_CASE("shooting agrees with the matrix spectrum") {
  const double c = 2.0;
  std::vector<double> h, err;
  for (std::size_t n : {101, 201, 401}) {
    const Grid g(n);
    const auto ms = matrix_spectrum(sturm_liouville_matrix(c, g), 2);
    const double mu0 = eigenvalue(c, 0, Grid(1601)).mu;
    h.push_back(g.spacing());
    err.push_back(std::abs(ms[0] - mu0));
  }
  CHECK(fitted_order(h, err) >= 1.8);
  const Grid g(801);
  const auto ms = matrix_spectrum(sturm_liouville_matrix(c, g), 2);
  CHECK(std::abs(ms[0] - eigenvalue(c, 0, g).mu) <= 1e-4);
  CHECK(std::abs(ms[1] - eigenvalue(c, 1, g).mu) <= 1e-3);
}

TEST_CASE("D changes sign upward through mu_0") {
  // Above mu_0 the shooting solution has no zero on (-1, 1].
  const Grid g(801);
  const double c = 2.0;
  const double mu0 = eigenvalue(c, 0, g).mu;
  CHECK(shoot(c, mu0 + 1e-3, g).D > 0.0);
  CHECK(shoot(c, mu0 - 1e-3, g).D < 0.0);
  const double dD = (shoot(c, mu0 + 1e-5, g).D - shoot(c, mu0 - 1e-5, g).D) / 2e-5;
  CHECK(dD > 0.0);
}

TEST_CASE("eigencurve around c_crit") {
  const auto curve = eigencurve(0.5, 2.5, 0, 11, Grid(401));
  CHECK(curve.sign_changes == 1);
  REQUIRE(curve.zero.has_value());
  CHECK(std::abs(*curve.zero - solve_c_crit()) <= 1e-4);
  CHECK(*curve.slope > 0.0);
  CHECK(curve.points.size() == 11);
  CHECK(curve.points.front().mu < 0.0);
  CHECK(curve.points.back().mu > 0.0);

  const auto c1 = eigencurve(0.5, 2.5, 1, 5, Grid(201));
  CHECK(c1.sign_changes == 0);
  CHECK_FALSE(c1.zero.has_value());
}

TEST_CASE("eigenvalue errors") {
  CHECK_THROWS_AS(eigenvalue(-1.0, 0, Grid(101)), Error);
  EigenvalueOptions opt;
  opt.mu_lower = -1.0;
  try {
    eigenvalue(2.0, 5, Grid(201), opt);
    FAIL("expected NotBracketed");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotBracketed);
  }
  CHECK_THROWS_AS(eigencurve(2.0, 1.0, 0, 5, Grid(101)), Error);
}

TEST_CASE("sign change counting") {
  const std::vector<double> f{0.0, 1.0, 0.0, -2.0, 3.0, 1e-14, 4.0};
  CHECK(count_sign_changes(f) == 2);
  CHECK(count_sign_changes(std::vector<double>{}) == 0);
}
