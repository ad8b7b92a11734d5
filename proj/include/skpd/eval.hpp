// Classification metrics, stratified cross-validation and the simulation
// sweep driver (patch size / noise level / shift ablation grids).
#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "skpd/fit.hpp"
#include "skpd/sim_data.hpp"

namespace skpd {

/// Mann-Whitney AUC with ties counted one half; throws on single-class input.
double auc(const std::vector<double>& scores, const std::vector<int>& labels);

/// Fraction of labels matched by thresholding probabilities at `threshold`.
double accuracy(const std::vector<double>& proba, const std::vector<int>& labels,
                double threshold = 0.5);

/// k disjoint (train, validation) index splits with per-fold class counts
/// within one sample of proportional; deterministic in the seed.
std::vector<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>>
stratified_kfold(const Dataset& data, std::size_t k, std::uint64_t seed);

struct MetricSummary {
  double mean_acc = 0.0, sd_acc = 0.0;
  double mean_auc = 0.0, sd_auc = 0.0;
  std::vector<double> fold_acc, fold_auc;
};

MetricSummary summarize_folds(const std::vector<double>& acc,
                              const std::vector<double>& aucs);

/// Stratified k-fold CV around fit(); metrics are computed on each held-out
/// fold from predicted probabilities.
MetricSummary cross_validate(const Dataset& data, const ShapeConfig& cfg,
                             std::size_t R, const PenaltyConfig& penalties,
                             bool use_shift, const SolverConfig& solver,
                             std::size_t k, std::uint64_t seed);

/// One grid point of a sweep. Axes not being swept hold the base values.
struct SweepCell {
  ShapeConfig shape;
  double sigma = 1.0;
  bool use_shift = true;
  double lambda_a = 0.0, lambda_b = 0.0, alpha = 1.0;
  std::string key;  // canonical cell identifier
};

struct SweepSpec {
  SimConfig base_sim;      // template, n, label noise; sigma comes from the cell
  ShapeConfig shape;
  std::size_t rank = 1;
  PenaltyConfig penalties;
  SolverConfig solver;
  bool use_shift = true;
  std::size_t folds = 5;
  std::uint64_t seed = 1;

  // Sweep axes; an empty axis keeps the base value fixed.
  std::vector<Index3> patch_axis;   // patch sizes; grid derived from data dims
  std::vector<double> sigma_axis;
  std::vector<int> shift_axis;      // 0 / 1
  std::vector<double> lambda_a_axis, lambda_b_axis, alpha_axis;
};

struct SweepCellResult {
  SweepCell cell;
  MetricSummary metrics;
  std::string error;  // nonempty if the cell failed; sweep continues
};

/// Runs CV over the cartesian product of the axes. Dataset and fold seeds
/// are derived from the data-relevant part of the cell key only, so cells
/// that differ in model settings (shift, penalties, patch) share identical
/// data and folds, and results are independent of grid order.
std::vector<SweepCellResult> run_sweep(const SweepSpec& spec,
                                       std::ostream* progress = nullptr);

/// CSV: one row per (cell, fold) plus mean/sd summary rows per cell.
/// Header: key,grid,patch,sigma,shift,lambda_a,lambda_b,alpha,fold,accuracy,auc
void write_sweep_csv(std::ostream& os, const std::vector<SweepCellResult>& results);

/// Aligned plain-text table, one cell per row.
std::string format_sweep_table(const std::vector<SweepCellResult>& results);

}  // namespace skpd
