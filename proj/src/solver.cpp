#include "skpd/solver.hpp"

#include <cmath>
#include <stdexcept>

namespace skpd {

void SolverConfig::validate() const {
  if (max_outer < 1) throw std::invalid_argument("SolverConfig: max_outer must be >= 1");
  if (outer_tol <= 0 || inner_tol <= 0)
    throw std::invalid_argument("SolverConfig: tolerances must be > 0");
  if (inner_max_iter < 1)
    throw std::invalid_argument("SolverConfig: inner_max_iter must be >= 1");
  if (line_search_beta <= 0.0 || line_search_beta >= 1.0)
    throw std::invalid_argument("SolverConfig: line_search_beta must be in (0,1)");
}

void PenalizedLogisticProblem::validate() const {
  const auto n_rows = design.rows();
  if (labels.size() != n_rows || offset.size() != n_rows)
    throw std::invalid_argument("problem: labels/offset length must match design rows");
  if (!design.allFinite() || !offset.allFinite())
    throw std::invalid_argument("problem: non-finite design or offset");
  for (Eigen::Index i = 0; i < labels.size(); ++i)
    if (labels[i] != 0.0 && labels[i] != 1.0)
      throw std::invalid_argument("problem: labels must be 0 or 1");
  if (penalty_weight.size() != 0 && penalty_weight.size() != design.cols())
    throw std::invalid_argument("problem: penalty_weight length mismatch");
  if (warm_start.size() != 0 && warm_start.size() != design.cols())
    throw std::invalid_argument("problem: warm_start length mismatch");
  if (penalty.lambda < 0) throw std::invalid_argument("problem: lambda must be >= 0");
}

namespace {

Eigen::VectorXd effective_weights(const PenalizedLogisticProblem& p) {
  if (p.penalty_weight.size() != 0) return p.penalty_weight;
  return Eigen::VectorXd::Ones(p.design.cols());
}

double data_loss_from_eta(const Eigen::VectorXd& eta, const Eigen::VectorXd& y) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i)
    s += softplus(eta[i]) - y[i] * eta[i];
  return s / static_cast<double>(eta.size());
}

/// Crude spectral-norm-squared estimate of X by a few power iterations;
/// seeds the Lipschitz constant for the line search.
double sqnorm_estimate(const Eigen::MatrixXd& x) {
  if (x.cols() == 0 || x.rows() == 0) return 0.0;
  Eigen::VectorXd v = Eigen::VectorXd::Ones(x.cols()).normalized();
  double s = 0.0;
  for (int it = 0; it < 8; ++it) {
    Eigen::VectorXd w = x.transpose() * (x * v);
    s = w.norm();
    if (s <= 0.0) return 0.0;
    v = w / s;
  }
  return s;
}

}  // namespace

double logistic_data_loss(const PenalizedLogisticProblem& p, const Eigen::VectorXd& w) {
  const Eigen::VectorXd eta = p.design * w + p.offset;
  return data_loss_from_eta(eta, p.labels);
}

Eigen::VectorXd logistic_data_grad(const PenalizedLogisticProblem& p,
                                   const Eigen::VectorXd& w) {
  Eigen::VectorXd eta = p.design * w + p.offset;
  for (Eigen::Index i = 0; i < eta.size(); ++i)
    eta[i] = sigmoid(eta[i]) - p.labels[i];
  return p.design.transpose() * eta / static_cast<double>(p.n());
}

double penalty_term(const PenalizedLogisticProblem& p, const Eigen::VectorXd& w) {
  const Eigen::VectorXd wt = effective_weights(p);
  double s = 0.0;
  if (p.penalty.kind == PenaltyKind::L1) {
    for (Eigen::Index j = 0; j < w.size(); ++j) s += wt[j] * std::abs(w[j]);
    return p.penalty.lambda * s;
  }
  const double a = p.penalty.alpha;
  for (Eigen::Index j = 0; j < w.size(); ++j)
    s += wt[j] * (a * std::abs(w[j]) + (1.0 - a) * w[j] * w[j]);
  return p.penalty.lambda * s;
}

Eigen::VectorXd prox_step(const PenalizedLogisticProblem& p,
                          const Eigen::VectorXd& u, double step) {
  const Eigen::VectorXd wt = effective_weights(p);
  const double lam = p.penalty.lambda;
  const double a = (p.penalty.kind == PenaltyKind::L1) ? 1.0 : p.penalty.alpha;
  const double ridge = (p.penalty.kind == PenaltyKind::L1) ? 0.0 : (1.0 - p.penalty.alpha);
  Eigen::VectorXd out(u.size());
  for (Eigen::Index j = 0; j < u.size(); ++j) {
    const double thr = step * lam * a * wt[j];
    double v = 0.0;
    if (u[j] > thr)
      v = u[j] - thr;
    else if (u[j] < -thr)
      v = u[j] + thr;
    out[j] = v / (1.0 + 2.0 * step * lam * ridge * wt[j]);
  }
  return out;
}

SolveResult solve_penalized_logistic(const PenalizedLogisticProblem& p,
                                     const SolverConfig& cfg) {
  p.validate();
  cfg.validate();
  SolveResult res;
  const auto m = p.design.cols();
  if (m == 0) {  // q = 0 with no intercept: nothing to solve
    res.converged = true;
    return res;
  }
  const double n = static_cast<double>(p.n());

  Eigen::VectorXd x = p.warm_start.size() ? p.warm_start
                                          : Eigen::VectorXd::Zero(m);
  auto objective_at = [&](const Eigen::VectorXd& w, double f_val) {
    return f_val + penalty_term(p, w);
  };

  double f_x = logistic_data_loss(p, x);
  double F_x = objective_at(x, f_x);

  double L = std::max(sqnorm_estimate(p.design) / (4.0 * n), 1e-12);
  constexpr double kLMax = 1e30;

  Eigen::VectorXd y = x;
  double theta = 1.0;

  for (std::size_t it = 1; it <= cfg.inner_max_iter; ++it) {
    res.iterations = it;
    Eigen::VectorXd eta = p.design * y + p.offset;
    const double f_y = data_loss_from_eta(eta, p.labels);
    for (Eigen::Index i = 0; i < eta.size(); ++i)
      eta[i] = sigmoid(eta[i]) - p.labels[i];
    const Eigen::VectorXd grad_y = p.design.transpose() * eta / n;

    // Backtracking: grow L until the quadratic model majorizes f at the
    // prox point.
    Eigen::VectorXd z;
    double f_z = 0.0;
    while (true) {
      z = prox_step(p, y - grad_y / L, 1.0 / L);
      const Eigen::VectorXd dz = z - y;
      f_z = logistic_data_loss(p, z);
      const double bound =
          f_y + grad_y.dot(dz) + 0.5 * L * dz.squaredNorm() + 1e-15 * (1.0 + std::abs(f_y));
      if (f_z <= bound) break;
      L /= cfg.line_search_beta;
      if (L > kLMax) {
        res.w = x;
        res.converged = false;
        res.objective = F_x;
        return res;
      }
    }
    const double F_z = objective_at(z, f_z);
    const double step_inf = (z - y).lpNorm<Eigen::Infinity>();

    // Monotone acceleration: keep the incumbent when the accelerated
    // candidate fails to descend.
    Eigen::VectorXd x_new;
    double F_new;
    if (F_z <= F_x) {
      x_new = z;
      F_new = F_z;
    } else {
      x_new = x;
      F_new = F_x;
    }

    if (step_inf <= cfg.inner_tol) {
      // Verify stationarity at the point actually returned.
      const Eigen::VectorXd grad_x = logistic_data_grad(p, x_new);
      const Eigen::VectorXd zx = prox_step(p, x_new - grad_x / L, 1.0 / L);
      if ((zx - x_new).lpNorm<Eigen::Infinity>() <= cfg.inner_tol) {
        res.w = x_new;
        res.converged = true;
        res.objective = F_new;
        return res;
      }
    }

    const double theta_new = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
    y = x_new + (theta / theta_new) * (z - x_new) +
        ((theta - 1.0) / theta_new) * (x_new - x);
    x = x_new;
    F_x = F_new;
    theta = theta_new;
    L *= 0.95;
  }

  res.w = x;
  res.converged = false;
  res.objective = F_x;
  return res;
}

}  // namespace skpd
