#pragma once

#include <Eigen/Core>

namespace fastreact {

/// Scalar field sampled at cell centers.
using Field = Eigen::ArrayXd;

/// Uniform cell-centered finite-volume grid on [0, length].
struct Grid1D {
  Grid1D(int n_cells, double domain_length);

  int n;
  double length;

  double h() const { return length / n; }
  double center(int j) const { return (j + 0.5) * h(); }
  Field centers() const;
};

/// Discrete Laplacian with no-flux boundaries, assembled in flux form so the
/// per-cell values telescope: h * sum(laplacian_neumann(phi)) vanishes to
/// rounding for every phi.
Field laplacian_neumann(const Eigen::Ref<const Field>& phi, const Grid1D& grid);

/// Midpoint rule, h * sum(phi). Exact for fields constant per cell.
double integrate(const Eigen::Ref<const Field>& phi, const Grid1D& grid);

}  // namespace fastreact
