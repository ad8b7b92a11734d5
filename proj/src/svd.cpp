#include "skpd/svd.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace skpd {

namespace {

void fix_sign(Eigen::VectorXd& u) {
  const double scale = u.cwiseAbs().maxCoeff();
  if (scale == 0.0) return;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    if (std::abs(u[i]) > 1e-12 * scale) {
      if (u[i] < 0.0) u = -u;
      return;
    }
  }
}

}  // namespace

TopSingularResult top_r_left_singular(const Eigen::MatrixXd& m, std::size_t r,
                                      double tol, std::uint64_t seed,
                                      std::size_t max_iter) {
  const auto rows = m.rows();
  const auto cols = m.cols();
  if (static_cast<Eigen::Index>(r) > std::min(rows, cols))
    throw std::invalid_argument("top_r_left_singular: r exceeds min(rows, cols)");
  if (tol <= 0.0) throw std::invalid_argument("top_r_left_singular: tol must be > 0");

  TopSingularResult res;
  const double scale = m.norm();  // Frobenius, upper bound on the spectral norm
  if (scale == 0.0) {
    res.converged = false;
    return res;
  }

  std::mt19937_64 eng(seed);
  auto random_unit = [&]() {
    Eigen::VectorXd v(rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
      // Box-Muller on the engine's raw stream keeps this reproducible.
      const double u1 = 1.0 - static_cast<double>(eng() >> 11) * 0x1.0p-53;
      const double u2 = static_cast<double>(eng() >> 11) * 0x1.0p-53;
      v[i] = std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
    }
    v.normalize();
    return v;
  };
  auto deflate = [&](Eigen::VectorXd& v) {
    for (const auto& u : res.vectors) v -= u.dot(v) * u;
  };

  for (std::size_t k = 0; k < r; ++k) {
    Eigen::VectorXd u = random_unit();
    deflate(u);
    if (u.norm() < 1e-12) u = random_unit();
    u.normalize();

    bool ok = false;
    double sigma = 0.0;
    Eigen::VectorXd v(cols);
    for (std::size_t it = 0; it < max_iter; ++it) {
      Eigen::VectorXd w = m.transpose() * u;  // d-vector
      Eigen::VectorXd t = m * w;              // back to p
      deflate(t);
      const double tn = t.norm();
      if (tn < 1e-300) break;  // residual matrix is (numerically) rank-deficient
      u = t / tn;
      v = m.transpose() * u;
      sigma = v.norm();
      if (sigma < 1e-300) break;
      Eigen::VectorXd resid = m * (v / sigma) - sigma * u;
      deflate(resid);
      if (resid.norm() <= tol * scale) {
        ok = true;
        break;
      }
    }
    if (!ok) {
      res.converged = false;
      return res;
    }
    fix_sign(u);
    res.vectors.push_back(u);
    res.values.push_back(sigma);
  }
  return res;
}

double kron_best_rank_r_error(const DenseTensor& c_star, const ShapeConfig& cfg,
                              std::size_t r) {
  if (r == 0) throw std::invalid_argument("kron_best_rank_r_error: r must be >= 1");
  const Eigen::MatrixXd m = rearrange(c_star, cfg);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  double tail = 0.0;
  for (Eigen::Index i = static_cast<Eigen::Index>(r); i < sv.size(); ++i)
    tail += sv[i] * sv[i];
  return std::sqrt(tail);
}

}  // namespace skpd
