#include "skpd/shift.hpp"

namespace skpd {

ShiftSpec default_shift(const ShapeConfig& cfg) {
  return {{cfg.patch[0] / 2, cfg.patch[1] / 2, cfg.patch[2] / 2}};
}

DenseTensor shift(const DenseTensor& x, const ShiftSpec& s) {
  const Index3 off = s.reduced(x.dims);
  if (off == Index3{0, 0, 0}) return x;
  const auto [D1, D2, D3] = x.dims;
  DenseTensor out(D1, D2, D3);
  for (std::size_t i = 0; i < D1; ++i) {
    const std::size_t si = (i + D1 - off[0]) % D1;
    for (std::size_t j = 0; j < D2; ++j) {
      const std::size_t sj = (j + D2 - off[1]) % D2;
      if (off[2] == 0) {
        const double* src = &x.data[(si * D2 + sj) * D3];
        double* dst = &out.data[(i * D2 + j) * D3];
        for (std::size_t k = 0; k < D3; ++k) dst[k] = src[k];
      } else {
        for (std::size_t k = 0; k < D3; ++k)
          out.at(i, j, k) = x.at(si, sj, (k + D3 - off[2]) % D3);
      }
    }
  }
  return out;
}

DenseTensor unshift(const DenseTensor& x, const ShiftSpec& s) {
  const Index3 off = s.reduced(x.dims);
  return shift(x, ShiftSpec{{(x.dims[0] - off[0]) % x.dims[0],
                             (x.dims[1] - off[1]) % x.dims[1],
                             (x.dims[2] - off[2]) % x.dims[2]}});
}

}  // namespace skpd
