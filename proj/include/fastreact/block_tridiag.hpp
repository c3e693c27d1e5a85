#pragma once

#include <Eigen/Core>
#include <Eigen/LU>
#include <stdexcept>
#include <vector>

namespace fastreact {

/// Thomas elimination for a block-tridiagonal system with B x B blocks.
/// lower[j] multiplies x_{j-1} (lower[0] ignored), upper[j] multiplies x_{j+1}
/// (upper[n-1] ignored). Blocks are factored with partially pivoted LU.
template <int B>
std::vector<Eigen::Matrix<double, B, 1>> solve_block_tridiagonal(
    std::vector<Eigen::Matrix<double, B, B>> diag,
    const std::vector<Eigen::Matrix<double, B, B>>& lower,
    const std::vector<Eigen::Matrix<double, B, B>>& upper,
    std::vector<Eigen::Matrix<double, B, 1>> rhs) {
  const std::size_t n = diag.size();
  if (n == 0 || lower.size() != n || upper.size() != n || rhs.size() != n)
    throw std::invalid_argument("solve_block_tridiagonal: band size mismatch");

  using Mat = Eigen::Matrix<double, B, B>;
  using Vec = Eigen::Matrix<double, B, 1>;

  // Forward sweep: eliminate the lower band.
  for (std::size_t j = 1; j < n; ++j) {
    Eigen::PartialPivLU<Mat> lu(diag[j - 1]);
    const Mat m = lower[j] * lu.inverse();
    diag[j] -= m * upper[j - 1];
    rhs[j] -= m * rhs[j - 1];
  }
  std::vector<Vec> x(n);
  x[n - 1] = diag[n - 1].partialPivLu().solve(rhs[n - 1]);
  for (std::size_t j = n - 1; j-- > 0;)
    x[j] = diag[j].partialPivLu().solve(rhs[j] - upper[j] * x[j + 1]);
  return x;
}

}  // namespace fastreact
