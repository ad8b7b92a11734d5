#include "skpd/pipeline.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace skpd {

SliceSelection slice_scores(const DenseTensor& c_hat) {
  if (c_hat.order() != 3)
    throw std::invalid_argument("slice_scores: input must be a 3D tensor");
  const auto [D1, D2, D3] = c_hat.dims;
  SliceSelection sel;
  sel.scores[0].assign(D1, 0.0);
  sel.scores[1].assign(D2, 0.0);
  sel.scores[2].assign(D3, 0.0);
  for (std::size_t i = 0; i < D1; ++i)
    for (std::size_t j = 0; j < D2; ++j)
      for (std::size_t k = 0; k < D3; ++k) {
        const double a = std::abs(c_hat.at(i, j, k));
        sel.scores[0][i] += a;
        sel.scores[1][j] += a;
        sel.scores[2][k] += a;
      }
  for (std::size_t p = 0; p < 3; ++p) {
    std::size_t best = 0;
    for (std::size_t k2 = 1; k2 < sel.scores[p].size(); ++k2)
      if (sel.scores[p][k2] > sel.scores[p][best]) best = k2;  // ties keep lowest
    sel.selected[p] = best;
    sel.degenerate[p] = sel.scores[p][best] == 0.0;
  }
  return sel;
}

DenseTensor extract_slice(const DenseTensor& t, Plane plane, std::size_t k) {
  const auto [D1, D2, D3] = t.dims;
  switch (plane) {
    case Plane::Axial: {
      if (k >= D1) throw std::invalid_argument("extract_slice: index out of range");
      DenseTensor s(D2, D3);
      for (std::size_t j = 0; j < D2; ++j)
        for (std::size_t l = 0; l < D3; ++l) s.at(j, l) = t.at(k, j, l);
      return s;
    }
    case Plane::Coronal: {
      if (k >= D2) throw std::invalid_argument("extract_slice: index out of range");
      DenseTensor s(D1, D3);
      for (std::size_t i = 0; i < D1; ++i)
        for (std::size_t l = 0; l < D3; ++l) s.at(i, l) = t.at(i, k, l);
      return s;
    }
    case Plane::Sagittal: {
      if (k >= D3) throw std::invalid_argument("extract_slice: index out of range");
      DenseTensor s(D1, D2);
      for (std::size_t i = 0; i < D1; ++i)
        for (std::size_t j = 0; j < D2; ++j) s.at(i, j) = t.at(i, j, k);
      return s;
    }
  }
  throw std::invalid_argument("extract_slice: bad plane");
}

CovariateScaler CovariateScaler::fit(const Eigen::MatrixXd& z) {
  const auto q = z.cols();
  const auto n = z.rows();
  CovariateScaler s;
  s.mean = Eigen::VectorXd::Zero(q);
  s.std_dev = Eigen::VectorXd::Ones(q);
  s.scaled.assign(static_cast<std::size_t>(q), false);
  for (Eigen::Index j = 0; j < q; ++j) {
    bool binary = true;
    for (Eigen::Index i = 0; i < n && binary; ++i)
      binary = z(i, j) == 0.0 || z(i, j) == 1.0;
    if (binary) continue;
    const double m = z.col(j).mean();
    const double var = (z.col(j).array() - m).square().sum() /
                       std::max<double>(1.0, static_cast<double>(n - 1));
    const double sd = std::sqrt(var);
    if (sd <= 0.0) continue;  // constant column stays untouched
    s.mean[j] = m;
    s.std_dev[j] = sd;
    s.scaled[static_cast<std::size_t>(j)] = true;
  }
  return s;
}

Eigen::MatrixXd CovariateScaler::transform(const Eigen::MatrixXd& z) const {
  Eigen::MatrixXd out = z;
  for (Eigen::Index j = 0; j < z.cols(); ++j)
    if (scaled[static_cast<std::size_t>(j)])
      out.col(j) = (z.col(j).array() - mean[j]) / std_dev[j];
  return out;
}

Eigen::MatrixXd CovariateScaler::inverse_transform(const Eigen::MatrixXd& z) const {
  Eigen::MatrixXd out = z;
  for (Eigen::Index j = 0; j < z.cols(); ++j)
    if (scaled[static_cast<std::size_t>(j)])
      out.col(j) = z.col(j).array() * std_dev[j] + mean[j];
  return out;
}

namespace {

DenseTensor abs_tensor(const DenseTensor& t) {
  DenseTensor out = t;
  for (auto& v : out.data) v = std::abs(v);
  return out;
}

ShapeConfig plane_config(const ShapeConfig& cfg2d, const Index3& slice_dims) {
  if (cfg2d.full() == slice_dims) return cfg2d;
  return ShapeConfig::for_full(slice_dims, cfg2d.patch);
}

}  // namespace

TwoStageResult run_two_stage(const Dataset& data3d, const ShapeConfig& cfg3d,
                             const ShapeConfig& cfg2d, std::size_t R,
                             const PenaltyConfig& penalties, bool use_shift,
                             const SolverConfig& solver, std::size_t folds,
                             std::uint64_t seed, bool standardize_covariates) {
  data3d.validate();
  if (data3d.n() == 0 || data3d.x[0].order() != 3)
    throw std::invalid_argument("run_two_stage: 3D volumes required");

  TwoStageResult out;
  Dataset data = data3d;
  out.scaler = CovariateScaler::fit(data3d.z);
  if (standardize_covariates && data.q() > 0)
    data.z = out.scaler.transform(data3d.z);

  // Stage 1: full 3D cyclic-shift fit.
  auto [model3d, report3d] = fit(data, cfg3d, R, penalties, use_shift, solver);
  out.model3d = std::move(model3d);
  out.report3d = std::move(report3d);

  out.combined_coefficients = coefficient_tensor(out.model3d, 0);
  DenseTensor scoring = abs_tensor(out.combined_coefficients);
  if (out.model3d.n_views() == 2) {
    const DenseTensor c2 = coefficient_tensor(out.model3d, 1);
    // Map the shifted view back to original coordinates before scoring.
    out.combined_coefficients.flat() +=
        unshift(c2, out.model3d.shift_spec).flat();
    scoring.flat() += unshift(abs_tensor(c2), out.model3d.shift_spec).flat();
  }
  out.selection = slice_scores(scoring);

  // Stage 2: one 2D dataset and model per plane.
  for (std::size_t p = 0; p < 3; ++p) {
    const auto plane = static_cast<Plane>(p);
    const std::size_t k = out.selection.selected[p];
    Dataset plane_data;
    plane_data.x.reserve(data.n());
    for (std::size_t i = 0; i < data.n(); ++i)
      plane_data.x.push_back(extract_slice(data.x[i], plane, k));
    plane_data.z = data.z;
    plane_data.y = data.y;

    const ShapeConfig cfg_p = plane_config(cfg2d, plane_data.dims());
    auto [m2, r2] = fit(plane_data, cfg_p, R, penalties, use_shift, solver);
    out.models2d[p] = std::move(m2);
    out.reports2d[p] = std::move(r2);
    out.metrics2d[p] = cross_validate(plane_data, cfg_p, R, penalties, use_shift,
                                      solver, folds, seed + p);
  }
  return out;
}

void export_coefficient_map(const DenseTensor& c_hat, Plane plane,
                            std::size_t slice_index, const std::string& base_path,
                            MapFormat format) {
  const DenseTensor slice = abs_tensor(extract_slice(c_hat, plane, slice_index));
  const std::size_t rows = slice.dims[0], cols = slice.dims[1];

  double lo = slice.data[0], hi = slice.data[0];
  for (double v : slice.data) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }

  if (format == MapFormat::Pgm || format == MapFormat::Both) {
    std::ofstream pgm(base_path + ".pgm", std::ios::binary);
    if (!pgm) throw std::runtime_error("cannot write " + base_path + ".pgm");
    pgm << "P5\n" << cols << " " << rows << "\n255\n";
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) {
        const double v = slice.at(i, j);
        const double x = hi > lo ? (v - lo) / (hi - lo) : 0.0;
        pgm.put(static_cast<char>(std::lround(x * 255.0)));
      }
    if (!pgm) throw std::runtime_error("write failure on " + base_path + ".pgm");

    std::ofstream side(base_path + ".scale.txt");
    side << "min = " << std::hexfloat << lo << "\nmax = " << hi << "\n"
         << std::defaultfloat;
    if (hi <= lo) side << "note = zero dynamic range; PGM is uniform\n";
  }

  if (format == MapFormat::Csv || format == MapFormat::Both) {
    std::ofstream csv(base_path + ".csv");
    if (!csv) throw std::runtime_error("cannot write " + base_path + ".csv");
    csv.precision(17);
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t j = 0; j < cols; ++j)
        csv << slice.at(i, j) << (j + 1 == cols ? '\n' : ',');
    }
    if (!csv) throw std::runtime_error("write failure on " + base_path + ".csv");
  }
}

}  // namespace skpd
