// Alternating block minimization: spectral initialization, per-block
// penalized logistic problems and the outer fitting loop.
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "skpd/solver.hpp"

namespace skpd {

/// Per-view rearranged (and for view 2, shifted) sample matrices, built once
/// per fit so block updates and objective evaluations reuse them.
class FitWorkspace {
 public:
  FitWorkspace(const Dataset& data, const ShapeConfig& cfg,
               const ShiftSpec& shift_spec, std::size_t n_views);

  const Eigen::MatrixXd& xr(std::size_t view, std::size_t i) const {
    return xr_[view][i];
  }
  std::size_t n_views() const { return xr_.size(); }
  std::size_t n() const { return xr_.empty() ? 0 : xr_[0].size(); }

 private:
  std::vector<std::vector<Eigen::MatrixXd>> xr_;
};

struct FitReport {
  std::vector<std::string> trace_labels;   // "init", "t0.v1.B", ... "t0.gamma"
  std::vector<double> objective_trace;     // full penalized objective
  std::size_t outer_iterations = 0;
  bool converged = false;
  bool init_fallback = false;              // spectral init degenerated to random
  std::size_t inner_nonconverged = 0;      // block solves that hit the budget
  std::vector<std::vector<std::size_t>> a_nonzeros;  // [view][r] = ||A||_0
  double final_objective = 0.0;
  double train_accuracy = 0.0;
  double train_auc = 0.0;
};

/// Spectral initialization: A_{v,r} from the top-R left singular vectors of
/// sum_i y_i K(X_{v,i}) reshaped to the grid, B_{v,r} = all ones, gamma = 0.
/// A zero weighted sum (or a non-converged extraction) falls back to seeded
/// random unit-norm factors; *fallback reports that.
SkpdModel initialize(const Dataset& data, const ShapeConfig& cfg, std::size_t R,
                     bool use_shift, std::uint64_t seed,
                     bool* fallback = nullptr);
SkpdModel initialize(const Dataset& data, const ShapeConfig& cfg, std::size_t R,
                     bool use_shift, std::uint64_t seed, const FitWorkspace& ws,
                     bool* fallback = nullptr);

/// B update for one view: design row i holds K(X_{v,i})^T vec(A_{v,r}) per
/// rank block; offset carries the other view plus covariates; elastic net.
PenalizedLogisticProblem build_B_problem(const Dataset& data, const SkpdModel& m,
                                         std::size_t view, const FitWorkspace& ws);

/// A update: design row i holds K(X_{v,i}) vec(B_{v,r}) per rank block; L1.
PenalizedLogisticProblem build_A_problem(const Dataset& data, const SkpdModel& m,
                                         std::size_t view, const FitWorkspace& ws);

/// gamma update: design stacks z_i (plus an unpenalized all-ones intercept
/// column when include_intercept); offset carries every image term.
PenalizedLogisticProblem build_gamma_problem(const Dataset& data, const SkpdModel& m,
                                             const FitWorkspace& ws,
                                             bool include_intercept = true);

/// Full alternating fit. Update order per outer round: for each view
/// {B then A}, then gamma; stops once the relative objective change drops
/// below outer_tol. The objective trace is recorded after every block.
std::pair<SkpdModel, FitReport> fit(const Dataset& data, const ShapeConfig& cfg,
                                    std::size_t R, const PenaltyConfig& penalties,
                                    bool use_shift, const SolverConfig& solver);

/// Objective evaluated through the workspace cache; equals
/// objective(model, data) up to floating-point reassociation.
double objective_cached(const SkpdModel& m, const Dataset& data,
                        const FitWorkspace& ws);

}  // namespace skpd
