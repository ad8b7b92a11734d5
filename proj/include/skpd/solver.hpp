// Penalized logistic sub-problems and the accelerated proximal-gradient
// solver shared by the B, A and gamma block updates.
#pragma once

#include <cstdint>
#include <string>

#include <Eigen/Dense>

#include "skpd/model.hpp"

namespace skpd {

struct SolverConfig {
  std::size_t max_outer = 30;        // T, alternating rounds
  double outer_tol = 1e-5;           // relative objective change
  std::size_t inner_max_iter = 500;  // prox-gradient iterations per block
  double inner_tol = 1e-6;           // prox-step infinity norm
  double line_search_beta = 0.5;     // step shrink factor (L grows by 1/beta)
  std::uint64_t seed = 1;

  void validate() const;
};

enum class PenaltyKind { L1, ElasticNet };

/// lambda * sum_j weight_j * (alpha |w_j| + (1-alpha) w_j^2) for ElasticNet,
/// the alpha=1 special case for L1. weight_j = 0 exempts a coordinate
/// (used for the intercept).
struct ProblemPenalty {
  PenaltyKind kind = PenaltyKind::L1;
  double lambda = 0.0;
  double alpha = 1.0;
};

/// One block update: minimize over w the mean logistic loss of
/// design * w + offset against labels, plus the penalty.
struct PenalizedLogisticProblem {
  Eigen::MatrixXd design;         // n x m
  Eigen::VectorXd labels;         // n entries in {0,1}
  Eigen::VectorXd offset;         // n
  ProblemPenalty penalty;
  Eigen::VectorXd penalty_weight; // m; empty means all ones
  Eigen::VectorXd warm_start;     // m

  std::size_t n() const { return static_cast<std::size_t>(design.rows()); }
  std::size_t m_dim() const { return static_cast<std::size_t>(design.cols()); }
  void validate() const;
};

struct SolveResult {
  Eigen::VectorXd w;
  bool converged = false;
  std::size_t iterations = 0;
  double objective = 0.0;  // data term + penalty at w
};

/// Mean logistic data term f(w) = (1/n) sum softplus(eta_i) - y_i eta_i.
double logistic_data_loss(const PenalizedLogisticProblem& p, const Eigen::VectorXd& w);

/// Analytic gradient (1/n) X^T (sigma(eta) - y).
Eigen::VectorXd logistic_data_grad(const PenalizedLogisticProblem& p,
                                   const Eigen::VectorXd& w);

double penalty_term(const PenalizedLogisticProblem& p, const Eigen::VectorXd& w);

/// Proximal operator of step * penalty at u. Elastic net uses
/// soft(u, step*lambda*alpha*wt) / (1 + 2*step*lambda*(1-alpha)*wt).
Eigen::VectorXd prox_step(const PenalizedLogisticProblem& p,
                          const Eigen::VectorXd& u, double step);

/// Monotone accelerated proximal gradient with backtracking line search.
/// Guarantees objective(result) <= objective(warm_start); converged means
/// the final accepted prox step moved by at most inner_tol in infinity norm.
SolveResult solve_penalized_logistic(const PenalizedLogisticProblem& p,
                                     const SolverConfig& cfg);

}  // namespace skpd
