// Cyclic translation of tensors with wrap-around. Semantically equal to the
// shift-matrix product (Q^T)^s1 X Q^s2 but implemented by index rotation.
#pragma once

#include "skpd/tensor.hpp"

namespace skpd {

/// Per-axis voxel offsets, interpreted modulo the tensor extent on use.
struct ShiftSpec {
  Index3 offsets{0, 0, 0};

  /// Offsets reduced into [0, dims_k).
  Index3 reduced(const Index3& dims) const {
    return {offsets[0] % dims[0], offsets[1] % dims[1], offsets[2] % dims[2]};
  }
  bool is_zero() const { return offsets == Index3{0, 0, 0}; }
};

/// Half the patch extent on every axis (floor for odd extents).
ShiftSpec default_shift(const ShapeConfig& cfg);

/// out[i,j,k] = x[(i - s1) mod D1, (j - s2) mod D2, (k - s3) mod D3]:
/// content moves down/right/forward by the offsets, wrapping around.
DenseTensor shift(const DenseTensor& x, const ShiftSpec& s);

/// Exact inverse of shift with the same spec.
DenseTensor unshift(const DenseTensor& x, const ShiftSpec& s);

}  // namespace skpd
