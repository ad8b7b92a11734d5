// Two-view SKPD logistic model: factor sets, penalties, linear predictor,
// penalized objective and binary model serialization.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "skpd/shift.hpp"
#include "skpd/tensor.hpp"

namespace skpd {

/// Penalty weights of the estimation objective: lambda_a * l1 on the
/// location factors A, an elastic net on the dictionary factors B
/// (alpha l1 + (1-alpha) squared Frobenius), lambda_gamma * l1 on gamma.
struct PenaltyConfig {
  double lambda_a = 0.0;
  double lambda_b = 0.0;
  double lambda_gamma = 0.0;
  double alpha = 1.0;  // clamped to [0,1]

  PenaltyConfig() = default;
  PenaltyConfig(double la, double lb, double lg, double a);
};

/// Rank-R factor lists for one view. A_r live on the grid, B_r on the patch.
struct FactorSet {
  std::vector<DenseTensor> A;
  std::vector<DenseTensor> B;

  std::size_t rank() const { return A.size(); }
  void validate(const ShapeConfig& cfg) const;
};

/// Fitted cyclic-shift SKPD logistic classifier. views[0] acts on the
/// original input; views[1], when present, on the cyclically shifted input.
/// The intercept is kept outside gamma and is never penalized.
struct SkpdModel {
  ShapeConfig cfg;
  ShiftSpec shift_spec;
  std::vector<FactorSet> views;  // size 1 or 2
  Eigen::VectorXd gamma;         // length q (0 = no covariates)
  double intercept = 0.0;
  PenaltyConfig penalties;

  std::size_t n_views() const { return views.size(); }
  std::size_t rank() const { return views.empty() ? 0 : views[0].rank(); }
  void validate() const;
};

/// Sample collection with uniform tensor dims and covariate width.
struct Dataset {
  std::vector<DenseTensor> x;
  Eigen::MatrixXd z;       // n x q
  std::vector<int> y;      // labels in {0,1}

  std::size_t n() const { return x.size(); }
  std::size_t q() const { return static_cast<std::size_t>(z.cols()); }
  Index3 dims() const { return x.empty() ? Index3{0, 0, 0} : x[0].dims; }
  void validate() const;
  Dataset subset(const std::vector<std::size_t>& idx) const;
  bool has_both_classes() const;
};

/// C_view = sum_r A_r (x) B_r at full dims.
DenseTensor coefficient_tensor(const SkpdModel& m, std::size_t view);

/// eta = <x, C_1> + <shift(x), C_2> + <z, gamma> + intercept, evaluated via
/// the rearranged bilinear form vec(A)^T K(x) vec(B) per view and rank.
double linear_predictor(const SkpdModel& m, const DenseTensor& x,
                        const Eigen::VectorXd& z);

/// Overflow-safe sigmoid.
double sigmoid(double t);
/// log(1 + exp(t)) without overflow.
double softplus(double t);

double predict_proba(const SkpdModel& m, const DenseTensor& x,
                     const Eigen::VectorXd& z);

/// 1 iff predict_proba >= threshold (probability exactly at the threshold
/// classifies as 1).
int classify(const SkpdModel& m, const DenseTensor& x, const Eigen::VectorXd& z,
             double threshold = 0.5);

double penalty_value(const SkpdModel& m);

/// Mean negative log-likelihood plus penalty_value, computed in softplus
/// form so saturated probabilities never produce log(0).
double objective(const SkpdModel& m, const Dataset& data);

/// Flat binary container, magic "SKPD"; round trips bit-exactly.
void save_model(const std::string& path, const SkpdModel& m);
SkpdModel load_model(const std::string& path);

}  // namespace skpd
