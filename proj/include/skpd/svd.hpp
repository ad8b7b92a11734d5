// Top-R left singular vectors by deflated power iteration, plus the best
// rank-R Kronecker-sum approximation error via SVD of the rearranged matrix.
#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "skpd/tensor.hpp"

namespace skpd {

struct TopSingularResult {
  std::vector<Eigen::VectorXd> vectors;  // orthonormal left singular vectors
  std::vector<double> values;            // matching singular values
  bool converged = true;                 // false if any pair missed the residual tol
};

/// Extracts the top-r left singular vectors of m with orthogonal deflation.
/// Start vectors are seeded, signs normalized so the first nonzero component
/// is positive. A pair counts as converged once ||M v - sigma u|| <= tol * ||M||_F.
/// On non-convergence the result carries the pairs extracted so far with
/// converged = false.
TopSingularResult top_r_left_singular(const Eigen::MatrixXd& m, std::size_t r,
                                      double tol = 1e-9,
                                      std::uint64_t seed = 12345,
                                      std::size_t max_iter = 10000);

/// min over rank-r Kronecker sums of || sum A_r (x) B_r  -  c_star ||_F,
/// i.e. the Frobenius norm of the tail singular values of rearrange(c_star).
double kron_best_rank_r_error(const DenseTensor& c_star, const ShapeConfig& cfg,
                              std::size_t r);

}  // namespace skpd
