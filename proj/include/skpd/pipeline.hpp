// Two-stage pipeline for volumes: fit the 3D cyclic-shift model, select the
// highest-magnitude slice per anatomical plane, then fit per-plane 2D models.
#pragma once

#include <array>
#include <string>

#include "skpd/eval.hpp"

namespace skpd {

/// Plane 0 fixes the first index (axial), plane 1 the second (coronal),
/// plane 2 the third (sagittal).
enum class Plane { Axial = 0, Coronal = 1, Sagittal = 2 };

struct SliceSelection {
  std::array<std::vector<double>, 3> scores;  // s_{p,k} per plane
  std::array<std::size_t, 3> selected{0, 0, 0};
  std::array<bool, 3> degenerate{false, false, false};  // all-zero scores
};

/// s_{p,k} = total |coefficient| mass of slice k in plane p; argmax wins,
/// ties resolve to the lowest index.
SliceSelection slice_scores(const DenseTensor& c_hat);

/// Extracts slice k of the given plane as a 2D tensor.
DenseTensor extract_slice(const DenseTensor& t, Plane plane, std::size_t k);

/// Column-wise standardization for continuous covariates; binary columns
/// ({0,1}-valued) and constant columns are left unscaled.
struct CovariateScaler {
  Eigen::VectorXd mean, std_dev;
  std::vector<bool> scaled;

  static CovariateScaler fit(const Eigen::MatrixXd& z);
  Eigen::MatrixXd transform(const Eigen::MatrixXd& z) const;
  Eigen::MatrixXd inverse_transform(const Eigen::MatrixXd& z) const;
};

struct TwoStageResult {
  SkpdModel model3d;
  FitReport report3d;
  /// C_1 + unshift(C_2): the effective coefficient tensor in original
  /// coordinates (the model's predictor equals <X, combined> + covariates).
  DenseTensor combined_coefficients;
  SliceSelection selection;
  std::array<SkpdModel, 3> models2d;
  std::array<FitReport, 3> reports2d;
  std::array<MetricSummary, 3> metrics2d;
  CovariateScaler scaler;
};

/// Stage 1 fits the 3D model and scores slices on |C_1| + unshift(|C_2|);
/// Stage 2 builds one 2D dataset per plane from the selected slices
/// (labels and covariates inherited verbatim) and fits + cross-validates a
/// 2D model per plane. cfg2d applies directly when its full dims match a
/// plane's slice dims; otherwise the grid is re-derived from cfg2d's patch.
TwoStageResult run_two_stage(const Dataset& data3d, const ShapeConfig& cfg3d,
                             const ShapeConfig& cfg2d, std::size_t R,
                             const PenaltyConfig& penalties, bool use_shift,
                             const SolverConfig& solver, std::size_t folds,
                             std::uint64_t seed,
                             bool standardize_covariates = true);

enum class MapFormat { Pgm, Csv, Both };

/// Writes |coefficients| of one slice as an 8-bit min-max scaled PGM plus an
/// exact-value CSV; scale factors go to a sidecar text file.
void export_coefficient_map(const DenseTensor& c_hat, Plane plane,
                            std::size_t slice_index, const std::string& base_path,
                            MapFormat format = MapFormat::Both);

}  // namespace skpd
