// Dense tensor storage, Kronecker products and the block-rearrangement
// operator that turns Kronecker sums into low-rank matrices.
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace skpd {

using Index3 = std::array<std::size_t, 3>;

/// Row-major order-1/2/3 tensor of doubles. Matrices use dims[2] == 1,
/// vectors dims[1] == dims[2] == 1. The last index varies fastest.
struct DenseTensor {
  Index3 dims{1, 1, 1};
  std::vector<double> data;

  DenseTensor() : data(1, 0.0) {}
  explicit DenseTensor(std::size_t d1, std::size_t d2 = 1, std::size_t d3 = 1);
  DenseTensor(Index3 d, std::vector<double> values);  // validates size + finiteness

  std::size_t size() const { return data.size(); }
  std::size_t dim(int k) const { return dims[static_cast<std::size_t>(k)]; }
  /// Tensor order: 3 unless trailing dims are singletons.
  int order() const;

  double& at(std::size_t i, std::size_t j = 0, std::size_t k = 0) {
    return data[(i * dims[1] + j) * dims[2] + k];
  }
  double at(std::size_t i, std::size_t j = 0, std::size_t k = 0) const {
    return data[(i * dims[1] + j) * dims[2] + k];
  }

  Eigen::Map<const Eigen::VectorXd> flat() const {
    return {data.data(), static_cast<Eigen::Index>(data.size())};
  }
  Eigen::Map<Eigen::VectorXd> flat() {
    return {data.data(), static_cast<Eigen::Index>(data.size())};
  }

  bool same_dims(const DenseTensor& o) const { return dims == o.dims; }
  void check_finite() const;  // throws on NaN/Inf
};

/// Factorization geometry: full dims D_k = grid p_k * patch d_k.
/// Grid cells index the location factor A, patches the dictionary factor B.
struct ShapeConfig {
  Index3 grid{1, 1, 1};
  Index3 patch{1, 1, 1};

  ShapeConfig() = default;
  ShapeConfig(Index3 g, Index3 d);  // validates every extent >= 1

  Index3 full() const {
    return {grid[0] * patch[0], grid[1] * patch[1], grid[2] * patch[2]};
  }
  std::size_t p() const { return grid[0] * grid[1] * grid[2]; }
  std::size_t d() const { return patch[0] * patch[1] * patch[2]; }

  /// Derive the grid from full dims and a patch size; throws unless the
  /// patch divides every dimension exactly.
  static ShapeConfig for_full(Index3 full_dims, Index3 patch_dims);
};

/// Kronecker product: entry at block (k,l,m), offset (u,v,w) of the result
/// is a[k,l,m] * b[u,v,w]. Output dims are elementwise products.
DenseTensor kron(const DenseTensor& a, const DenseTensor& b);

/// Block rearrangement: maps a (p1 d1)x(p2 d2)x(p3 d3) tensor to a p x d
/// matrix whose row (k,l,m) holds the row-major vec of the (k,l,m)-th
/// d1 x d2 x d3 block. Satisfies rearrange(kron(A,B)) = vec(A) vec(B)^T.
Eigen::MatrixXd rearrange(const DenseTensor& c, const ShapeConfig& cfg);

/// Inverse of rearrange: exact round trip.
DenseTensor rearrange_inverse(const Eigen::MatrixXd& m, const ShapeConfig& cfg);

/// Frobenius inner product; dims must match.
double inner(const DenseTensor& a, const DenseTensor& b);

/// Frobenius norm. Squared entries are accumulated in sorted order so any
/// permutation of the same entries (e.g. a cyclic shift) yields the
/// identical floating-point value.
double frob_norm(const DenseTensor& t);

}  // namespace skpd
