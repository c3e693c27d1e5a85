#include "fastreact/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace fastreact {

Grid1D::Grid1D(int n_cells, double domain_length) : n(n_cells), length(domain_length) {
  if (n_cells < 3) throw std::invalid_argument("Grid1D: need at least 3 cells");
  if (!(domain_length > 0.0) || !std::isfinite(domain_length))
    throw std::invalid_argument("Grid1D: length must be positive and finite");
}

Field Grid1D::centers() const {
  Field x(n);
  for (int j = 0; j < n; ++j) x(j) = center(j);
  return x;
}

Field laplacian_neumann(const Eigen::Ref<const Field>& phi, const Grid1D& grid) {
  const Eigen::Index n = phi.size();
  if (n != grid.n) throw std::invalid_argument("laplacian_neumann: field/grid size mismatch");
  const double inv_h2 = 1.0 / (grid.h() * grid.h());

  // Face differences; the two boundary fluxes are zero.
  Field d = phi.tail(n - 1) - phi.head(n - 1);
  Field out(n);
  out(0) = d(0) * inv_h2;
  out.segment(1, n - 2) = (d.tail(n - 2) - d.head(n - 2)) * inv_h2;
  out(n - 1) = -d(n - 2) * inv_h2;
  return out;
}

double integrate(const Eigen::Ref<const Field>& phi, const Grid1D& grid) {
  if (phi.size() != grid.n) throw std::invalid_argument("integrate: field/grid size mismatch");
  return grid.h() * phi.sum();
}

}  // namespace fastreact
