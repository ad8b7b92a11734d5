#include "skpd/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace skpd {

namespace {

std::size_t checked_volume(const Index3& d) {
  if (d[0] == 0 || d[1] == 0 || d[2] == 0)
    throw std::invalid_argument("tensor dims must be >= 1");
  std::size_t v = d[0];
  if (d[1] > std::numeric_limits<std::size_t>::max() / v)
    throw std::overflow_error("tensor dimension product overflows");
  v *= d[1];
  if (d[2] > std::numeric_limits<std::size_t>::max() / v)
    throw std::overflow_error("tensor dimension product overflows");
  return v * d[2];
}

}  // namespace

DenseTensor::DenseTensor(std::size_t d1, std::size_t d2, std::size_t d3)
    : dims{d1, d2, d3}, data(checked_volume(dims), 0.0) {}

DenseTensor::DenseTensor(Index3 d, std::vector<double> values)
    : dims(d), data(std::move(values)) {
  if (data.size() != checked_volume(dims))
    throw std::invalid_argument("tensor data length does not match dims");
  check_finite();
}

int DenseTensor::order() const {
  if (dims[2] > 1) return 3;
  if (dims[1] > 1) return 2;
  return 1;
}

void DenseTensor::check_finite() const {
  for (double v : data)
    if (!std::isfinite(v))
      throw std::invalid_argument("tensor contains a non-finite entry");
}

ShapeConfig::ShapeConfig(Index3 g, Index3 d) : grid(g), patch(d) {
  for (int k = 0; k < 3; ++k)
    if (grid[static_cast<std::size_t>(k)] == 0 || patch[static_cast<std::size_t>(k)] == 0)
      throw std::invalid_argument("ShapeConfig extents must be >= 1");
  checked_volume(full());
}

ShapeConfig ShapeConfig::for_full(Index3 full_dims, Index3 patch_dims) {
  Index3 g;
  for (std::size_t k = 0; k < 3; ++k) {
    if (patch_dims[k] == 0 || full_dims[k] % patch_dims[k] != 0)
      throw std::invalid_argument(
          "patch extent " + std::to_string(patch_dims[k]) +
          " does not divide dimension " + std::to_string(full_dims[k]));
    g[k] = full_dims[k] / patch_dims[k];
  }
  return {g, patch_dims};
}

DenseTensor kron(const DenseTensor& a, const DenseTensor& b) {
  Index3 out_dims;
  for (std::size_t k = 0; k < 3; ++k) {
    if (a.dims[k] != 0 && b.dims[k] > std::numeric_limits<std::size_t>::max() / a.dims[k])
      throw std::overflow_error("kron output dimension overflows");
    out_dims[k] = a.dims[k] * b.dims[k];
  }
  DenseTensor out(out_dims[0], out_dims[1], out_dims[2]);
  const auto [bd1, bd2, bd3] = b.dims;
  for (std::size_t k = 0; k < a.dims[0]; ++k)
    for (std::size_t l = 0; l < a.dims[1]; ++l)
      for (std::size_t m = 0; m < a.dims[2]; ++m) {
        const double av = a.at(k, l, m);
        if (av == 0.0) continue;
        for (std::size_t u = 0; u < bd1; ++u)
          for (std::size_t v = 0; v < bd2; ++v)
            for (std::size_t w = 0; w < bd3; ++w)
              out.at(k * bd1 + u, l * bd2 + v, m * bd3 + w) = av * b.at(u, v, w);
      }
  return out;
}

Eigen::MatrixXd rearrange(const DenseTensor& c, const ShapeConfig& cfg) {
  if (c.dims != cfg.full())
    throw std::invalid_argument("rearrange: tensor dims do not match ShapeConfig");
  const auto [p1, p2, p3] = cfg.grid;
  const auto [d1, d2, d3] = cfg.patch;
  Eigen::MatrixXd out(static_cast<Eigen::Index>(cfg.p()),
                      static_cast<Eigen::Index>(cfg.d()));
  for (std::size_t k = 0; k < p1; ++k)
    for (std::size_t l = 0; l < p2; ++l)
      for (std::size_t m = 0; m < p3; ++m) {
        const auto row = static_cast<Eigen::Index>((k * p2 + l) * p3 + m);
        for (std::size_t u = 0; u < d1; ++u)
          for (std::size_t v = 0; v < d2; ++v)
            for (std::size_t w = 0; w < d3; ++w)
              out(row, static_cast<Eigen::Index>((u * d2 + v) * d3 + w)) =
                  c.at(k * d1 + u, l * d2 + v, m * d3 + w);
      }
  return out;
}

DenseTensor rearrange_inverse(const Eigen::MatrixXd& m, const ShapeConfig& cfg) {
  if (m.rows() != static_cast<Eigen::Index>(cfg.p()) ||
      m.cols() != static_cast<Eigen::Index>(cfg.d()))
    throw std::invalid_argument("rearrange_inverse: matrix shape does not match ShapeConfig");
  const auto [p1, p2, p3] = cfg.grid;
  const auto [d1, d2, d3] = cfg.patch;
  const Index3 full = cfg.full();
  DenseTensor out(full[0], full[1], full[2]);
  for (std::size_t k = 0; k < p1; ++k)
    for (std::size_t l = 0; l < p2; ++l)
      for (std::size_t m3 = 0; m3 < p3; ++m3) {
        const auto row = static_cast<Eigen::Index>((k * p2 + l) * p3 + m3);
        for (std::size_t u = 0; u < d1; ++u)
          for (std::size_t v = 0; v < d2; ++v)
            for (std::size_t w = 0; w < d3; ++w)
              out.at(k * d1 + u, l * d2 + v, m3 * d3 + w) =
                  m(row, static_cast<Eigen::Index>((u * d2 + v) * d3 + w));
      }
  return out;
}

double inner(const DenseTensor& a, const DenseTensor& b) {
  if (!a.same_dims(b))
    throw std::invalid_argument("inner: tensor dims differ");
  return a.flat().dot(b.flat());
}

double frob_norm(const DenseTensor& t) {
  std::vector<double> sq(t.data.size());
  std::transform(t.data.begin(), t.data.end(), sq.begin(),
                 [](double v) { return v * v; });
  std::sort(sq.begin(), sq.end());
  double s = 0.0;
  for (double v : sq) s += v;
  return std::sqrt(s);
}

}  // namespace skpd
