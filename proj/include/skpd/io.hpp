// File formats: the "KTEN" binary tensor container, dataset manifests
// (tensor files + CSV of labels/covariates), key=value experiment configs
// and fit-report serialization.
#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "skpd/fit.hpp"
#include "skpd/model.hpp"

namespace skpd {

/// Writes magic "KTEN", version, order, dims, little-endian f64 payload and
/// a CRC32 of the payload bytes.
void write_tensor(const std::filesystem::path& path, const DenseTensor& t);

/// Validates magic, version, size and checksum; throws rather than return a
/// partial tensor.
DenseTensor read_tensor(const std::filesystem::path& path);

/// Writes per-sample tensor files next to a manifest.csv with header
/// tensor,split,y,z0..z{q-1}. Split values are "train"/"test".
void write_dataset(const std::filesystem::path& dir, const Dataset& train,
                   const Dataset& test);

/// Reads samples whose split matches (split = "all" keeps everything).
/// Optionally standardizes continuous covariates.
Dataset read_dataset(const std::filesystem::path& manifest_csv,
                     const std::string& split = "all",
                     bool standardize_covariates = false);

/// Plain-text key=value experiment configuration. Unknown keys are
/// rejected; to_manifest() echoes every value (a manifest is itself a
/// valid config, so runs can be reproduced from it).
struct ExperimentConfig {
  // data source
  std::string data;            // dataset manifest.csv path ("" = none)
  std::string split = "train";
  // simulation
  std::string template_name;   // disks|rings|lobes|two_balls|one_ball ("" = none)
  std::string class0_template; // optional class-0 template name
  Index3 dims{128, 128, 1};
  std::size_t n = 1000;
  double sigma = 1.0;
  double label_noise_std = 1.0;
  double train_fraction = 0.8;
  // geometry / model
  Index3 grid{32, 32, 1};
  Index3 patch{4, 4, 1};
  std::size_t rank = 1;
  bool use_shift = true;
  double lambda_a = 0.01, lambda_b = 0.001, lambda_gamma = 0.01, alpha = 0.2;
  // solver
  std::size_t max_outer = 30;
  double outer_tol = 1e-5;
  std::size_t inner_max_iter = 500;
  double inner_tol = 1e-6;
  double line_search_beta = 0.5;
  std::uint64_t seed = 1;
  // evaluation
  std::size_t folds = 5;
  double threshold = 0.5;
  bool standardize_covariates = false;
  // sweep grids (empty = not swept)
  std::vector<Index3> patch_grid;
  std::vector<double> sigma_grid, lambda_a_grid, lambda_b_grid, alpha_grid;
  std::vector<int> shift_grid;
  // stage-2 patch for the slices pipeline
  Index3 patch2d{4, 4, 1};
  // io
  std::string model_path;
  std::string out = "skpd_out";

  static ExperimentConfig from_file(const std::filesystem::path& path);
  void apply_line(const std::string& key, const std::string& value);
  std::string to_manifest() const;

  SolverConfig solver() const;
  PenaltyConfig penalties() const;
  ShapeConfig shape() const { return {grid, patch}; }
};

/// Human-readable structured fit report (JSON).
void write_fit_report(const std::filesystem::path& path, const FitReport& r);
/// Objective trace CSV: step,label,objective.
void write_trace_csv(const std::filesystem::path& path, const FitReport& r);

}  // namespace skpd
