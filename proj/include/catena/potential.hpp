#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "catena/error.hpp"
#include "catena/grid.hpp"
#include "catena/model.hpp"

namespace catena {

// Electrostatic potential between the film r = u(z) + 1 and the cylinder r = 2:
//
//   (1/r) (r psi_r)_r + sigma^2 psi_zz = 0,   psi = 0 on the film, 1 on the cylinder,
//   psi = ln(r/(u+1)) / ln(2/(u+1)) on the ring planes z = +-1.
//
// The gap is mapped onto eta = (r - s(z)) / (2 - s(z)) in [0, 1], s = u + 1.

/// Logarithmic boundary potential at radius r above a film at height u(z) + 1.
inline double boundary_data(double u_at_z, double r) {
  const double s = u_at_z + 1.0;
  if (!(s > kGapEpsilon)) {
    throw Error(ErrorKind::SingularGap, "boundary_data: u + 1 <= " + std::to_string(kGapEpsilon));
  }
  return std::log(r / s) / std::log(2.0 / s);
}

/// Same, with u(z) linearly interpolated from the profile.
inline double boundary_data(const Profile& u, double z, double r) {
  const auto& g = u.grid;
  const double x = (z + 1.0) / g.spacing();
  auto i =
      static_cast<std::size_t>(std::floor(std::clamp(x, 0.0, static_cast<double>(g.size() - 1))));
  if (i >= g.size() - 1) i = g.size() - 2;
  const double t = std::clamp(x - static_cast<double>(i), 0.0, 1.0);
  return boundary_data((1.0 - t) * u[i] + t * u[i + 1], r);
}

inline std::size_t default_n_eta(std::size_t n_z) { return (n_z + 1) / 2 + 1; }

/// Potential on the mapped rectangle; psi is stored z-major: psi[i * n_eta + j].
struct PotentialGrid {
  Profile profile;
  double sigma = 0.0;
  std::size_t n_z = 0;
  std::size_t n_eta = 0;
  std::vector<double> psi;
  double linear_residual = 0.0;  ///< max row-scaled residual of the discrete system

  [[nodiscard]] double at(std::size_t i, std::size_t j) const { return psi[i * n_eta + j]; }
  [[nodiscard]] double eta(std::size_t j) const {
    return static_cast<double>(j) / static_cast<double>(n_eta - 1);
  }
  [[nodiscard]] double r(std::size_t i, std::size_t j) const {
    const double s = profile[i] + 1.0;
    return s + eta(j) * (2.0 - s);
  }
};

/// Second-order finite differences of the mapped equation, including the
/// first-order and mixed terms the map generates, solved by sparse LU with
/// one step of iterative refinement.
inline PotentialGrid solve_potential(const Profile& u, double sigma, std::size_t n_eta = 0) {
  require_gap(u.values);
  const std::size_t nz = u.size();
  if (n_eta == 0) n_eta = default_n_eta(nz);
  if (n_eta < 4) throw Error(ErrorKind::InvalidConfig, "solve_potential: n_eta must be >= 4");
  const double hz = u.grid.spacing();
  const double he = 1.0 / static_cast<double>(n_eta - 1);

  PotentialGrid pg;
  pg.profile = u;
  pg.sigma = sigma;
  pg.n_z = nz;
  pg.n_eta = n_eta;
  pg.psi.assign(nz * n_eta, 0.0);
  for (std::size_t i = 0; i < nz; ++i) {
    pg.psi[i * n_eta + n_eta - 1] = 1.0;
  }
  for (std::size_t i : {std::size_t{0}, nz - 1}) {
    for (std::size_t j = 1; j + 1 < n_eta; ++j)
      pg.psi[i * n_eta + j] = boundary_data(u[i], pg.r(i, j));
  }

  std::vector<double> s(nz);
  for (std::size_t i = 0; i < nz; ++i) s[i] = u[i] + 1.0;
  const auto ds = derivative(s, hz);
  const auto dds = second_derivative(s, hz);

  const std::size_t mz = nz - 2;
  const std::size_t me = n_eta - 2;
  const auto unknowns = static_cast<Eigen::Index>(mz * me);
  auto index = [me](std::size_t i, std::size_t j) {
    return static_cast<Eigen::Index>((i - 1) * me + (j - 1));
  };
  auto interior = [&](std::size_t i, std::size_t j) {
    return i >= 1 && i + 1 < nz && j >= 1 && j + 1 < n_eta;
  };

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(unknowns) * 9);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(unknowns);
  const double s2 = sigma * sigma;

  for (std::size_t i = 1; i + 1 < nz; ++i) {
    const double beta = 1.0 / (2.0 - s[i]);
    for (std::size_t j = 1; j + 1 < n_eta; ++j) {
      const double eta = pg.eta(j);
      const double r = s[i] + eta * (2.0 - s[i]);
      const double gamma = -ds[i] * (1.0 - eta) * beta;
      const double gamma_z = -(1.0 - eta) * (dds[i] * beta + 2.0 * ds[i] * ds[i] * beta * beta);
      const double a_ee = beta * beta + s2 * gamma * gamma;
      const double a_zz = s2;
      const double a_ze = 2.0 * s2 * gamma;
      const double b_e = beta / r + s2 * gamma_z;

      const double center = -2.0 * a_zz / (hz * hz) - 2.0 * a_ee / (he * he);
      const double scale = -1.0 / center;
      const double cz = a_zz / (hz * hz) * scale;
      const double ce_p = (a_ee / (he * he) + b_e / (2.0 * he)) * scale;
      const double ce_m = (a_ee / (he * he) - b_e / (2.0 * he)) * scale;
      const double cx = a_ze / (4.0 * hz * he) * scale;

      const Eigen::Index row = index(i, j);
      triplets.emplace_back(row, row, -1.0);
      const struct {
        std::size_t ii, jj;
        double coef;
      } nbrs[] = {
          {i + 1, j, cz},     {i - 1, j, cz},     {i, j + 1, ce_p},    {i, j - 1, ce_m},
          {i + 1, j + 1, cx}, {i - 1, j - 1, cx}, {i + 1, j - 1, -cx}, {i - 1, j + 1, -cx},
      };
      for (const auto& nb : nbrs) {
        if (nb.coef == 0.0) continue;
        if (interior(nb.ii, nb.jj)) {
          triplets.emplace_back(row, index(nb.ii, nb.jj), nb.coef);
        } else {
          rhs[row] -= nb.coef * pg.psi[nb.ii * n_eta + nb.jj];
        }
      }
    }
  }

  Eigen::SparseMatrix<double> a(unknowns, unknowns);
  a.setFromTriplets(triplets.begin(), triplets.end());
  a.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.analyzePattern(a);
  lu.factorize(a);
  if (lu.info() != Eigen::Success) {
    throw Error(ErrorKind::NoConvergence, "solve_potential: sparse factorization failed");
  }
  Eigen::VectorXd x = lu.solve(rhs);
  Eigen::VectorXd res = rhs - a * x;
  x += lu.solve(res);
  res = rhs - a * x;
  pg.linear_residual = res.lpNorm<Eigen::Infinity>();
  if (!(pg.linear_residual <= 1e-10)) {
    throw Error(ErrorKind::NoConvergence,
                "solve_potential: linear residual " + std::to_string(pg.linear_residual));
  }
  for (std::size_t i = 1; i + 1 < nz; ++i) {
    for (std::size_t j = 1; j + 1 < n_eta; ++j) pg.psi[i * n_eta + j] = x[index(i, j)];
  }
  return pg;
}

/// g = (1 + sigma^2 u'^2)^{3/2} |d psi/dr|^2 on the film, with d psi/dr = beta d psi/d eta
/// from a four-point one-sided difference at eta = 0.
inline ForceField electrostatic_force(const Profile& u, const PotentialGrid& pg, double sigma) {
  require_gap(u.values);
  const std::size_t nz = u.size();
  const double he = 1.0 / static_cast<double>(pg.n_eta - 1);
  const auto du = derivative(u.values, u.grid.spacing());
  std::vector<double> g(nz);
  for (std::size_t i = 0; i < nz; ++i) {
    const double beta = 1.0 / (1.0 - u[i]);
    const double dpsi =
        (-11.0 * pg.at(i, 0) + 18.0 * pg.at(i, 1) - 9.0 * pg.at(i, 2) + 2.0 * pg.at(i, 3)) /
        (6.0 * he);
    const double dr = beta * dpsi;
    const double w = 1.0 + sigma * sigma * du[i] * du[i];
    g[i] = w * std::sqrt(w) * dr * dr;
  }
  return {u.grid, std::move(g)};
}

/// Largest second difference of the force within `edge` nodes of the ring
/// planes relative to the largest one elsewhere. Values well above 1 flag
/// error coming from the corners where side data meets the cylinder.
inline double corner_flux_roughness(const ForceField& g, std::size_t edge = 5) {
  const std::size_t n = g.values.size();
  double near = 0.0;
  double far = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double d2 = std::abs(g[i + 1] - 2.0 * g[i] + g[i - 1]);
    double& slot = (i <= edge || i + 1 + edge >= n) ? near : far;
    slot = std::max(slot, d2);
  }
  return far > 0.0 ? near / far : near;
}

}  // namespace catena
