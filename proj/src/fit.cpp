#include "skpd/fit.hpp"

#include <cmath>
#include <stdexcept>

#include "skpd/eval.hpp"
#include "skpd/rng.hpp"
#include "skpd/svd.hpp"

namespace skpd {

FitWorkspace::FitWorkspace(const Dataset& data, const ShapeConfig& cfg,
                           const ShiftSpec& shift_spec, std::size_t n_views) {
  if (n_views < 1 || n_views > 2)
    throw std::invalid_argument("FitWorkspace: n_views must be 1 or 2");
  xr_.resize(n_views);
  for (auto& view : xr_) view.reserve(data.n());
  for (std::size_t i = 0; i < data.n(); ++i) {
    xr_[0].push_back(rearrange(data.x[i], cfg));
    if (n_views == 2)
      xr_[1].push_back(rearrange(shift(data.x[i], shift_spec), cfg));
  }
}

namespace {

double bilinear(const Eigen::MatrixXd& xr, const FactorSet& fs) {
  double s = 0.0;
  for (std::size_t r = 0; r < fs.rank(); ++r)
    s += fs.A[r].flat().dot(xr * fs.B[r].flat());
  return s;
}

/// eta_i for the full model through the cache.
double predictor_cached(const SkpdModel& m, const Dataset& data,
                        const FitWorkspace& ws, std::size_t i) {
  double eta = 0.0;
  for (std::size_t v = 0; v < m.views.size(); ++v)
    eta += bilinear(ws.xr(v, i), m.views[v]);
  if (m.gamma.size() > 0)
    eta += data.z.row(static_cast<Eigen::Index>(i)).dot(m.gamma);
  return eta + m.intercept;
}

/// Offset for an image-block update of `view`: every other view's image
/// term plus the covariate term.
Eigen::VectorXd image_block_offset(const Dataset& data, const SkpdModel& m,
                                   std::size_t view, const FitWorkspace& ws) {
  Eigen::VectorXd off(static_cast<Eigen::Index>(data.n()));
  for (std::size_t i = 0; i < data.n(); ++i) {
    double s = 0.0;
    for (std::size_t v = 0; v < m.views.size(); ++v)
      if (v != view) s += bilinear(ws.xr(v, i), m.views[v]);
    if (m.gamma.size() > 0)
      s += data.z.row(static_cast<Eigen::Index>(i)).dot(m.gamma);
    off[static_cast<Eigen::Index>(i)] = s + m.intercept;
  }
  return off;
}

Eigen::VectorXd labels_vector(const Dataset& data) {
  Eigen::VectorXd y(static_cast<Eigen::Index>(data.n()));
  for (std::size_t i = 0; i < data.n(); ++i)
    y[static_cast<Eigen::Index>(i)] = static_cast<double>(data.y[i]);
  return y;
}

DenseTensor reshape_to(const Eigen::VectorXd& v, const Index3& dims) {
  DenseTensor t(dims[0], dims[1], dims[2]);
  t.flat() = v;
  return t;
}

DenseTensor random_unit_tensor(const Index3& dims, std::uint64_t seed) {
  DenseTensor t(dims[0], dims[1], dims[2]);
  Rng rng(seed);
  for (auto& v : t.data) v = rng.normal();
  const double nrm = t.flat().norm();
  if (nrm > 0) t.flat() /= nrm;
  return t;
}

}  // namespace

SkpdModel initialize(const Dataset& data, const ShapeConfig& cfg, std::size_t R,
                     bool use_shift, std::uint64_t seed, bool* fallback) {
  const ShiftSpec s = use_shift ? default_shift(cfg) : ShiftSpec{};
  FitWorkspace ws(data, cfg, s, use_shift ? 2 : 1);
  return initialize(data, cfg, R, use_shift, seed, ws, fallback);
}

SkpdModel initialize(const Dataset& data, const ShapeConfig& cfg, std::size_t R,
                     bool use_shift, std::uint64_t seed, const FitWorkspace& ws,
                     bool* fallback) {
  if (data.n() < 1) throw std::invalid_argument("initialize: empty dataset");
  if (R < 1) throw std::invalid_argument("initialize: R must be >= 1");
  if (data.dims() != cfg.full())
    throw std::invalid_argument("initialize: dataset dims do not match ShapeConfig");
  if (static_cast<Eigen::Index>(R) >
      std::min(static_cast<Eigen::Index>(cfg.p()), static_cast<Eigen::Index>(cfg.d())))
    throw std::invalid_argument("initialize: R exceeds min(p, d)");

  SkpdModel m;
  m.cfg = cfg;
  m.shift_spec = use_shift ? default_shift(cfg) : ShiftSpec{};
  m.gamma = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(data.q()));
  m.intercept = 0.0;
  bool used_fallback = false;

  const std::size_t n_views = use_shift ? 2 : 1;
  for (std::size_t v = 0; v < n_views; ++v) {
    Eigen::MatrixXd weighted = Eigen::MatrixXd::Zero(
        static_cast<Eigen::Index>(cfg.p()), static_cast<Eigen::Index>(cfg.d()));
    for (std::size_t i = 0; i < data.n(); ++i)
      if (data.y[i] == 1) weighted += ws.xr(v, i);

    FactorSet fs;
    std::vector<Eigen::VectorXd> vecs;
    if (weighted.norm() > 0.0) {
      const auto top = top_r_left_singular(weighted, R, 1e-9, seed + v);
      vecs = top.vectors;
      if (!top.converged) used_fallback = true;
    } else {
      used_fallback = true;
    }
    for (std::size_t r = 0; r < R; ++r) {
      if (r < vecs.size()) {
        fs.A.push_back(reshape_to(vecs[r], cfg.grid));
      } else {
        fs.A.push_back(random_unit_tensor(
            cfg.grid, fnv1a64("init.fallback", seed) + 131 * v + r));
      }
      DenseTensor ones(cfg.patch[0], cfg.patch[1], cfg.patch[2]);
      ones.flat().setOnes();
      fs.B.push_back(std::move(ones));
    }
    m.views.push_back(std::move(fs));
  }
  if (fallback) *fallback = used_fallback;
  return m;
}

PenalizedLogisticProblem build_B_problem(const Dataset& data, const SkpdModel& m,
                                         std::size_t view, const FitWorkspace& ws) {
  if (view >= m.views.size())
    throw std::invalid_argument("build_B_problem: view out of range");
  const std::size_t R = m.rank();
  const std::size_t d = m.cfg.d();
  const auto n = static_cast<Eigen::Index>(data.n());
  PenalizedLogisticProblem p;
  p.design.resize(n, static_cast<Eigen::Index>(d * R));
  for (std::size_t i = 0; i < data.n(); ++i)
    for (std::size_t r = 0; r < R; ++r)
      p.design.block(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(r * d),
                     1, static_cast<Eigen::Index>(d)) =
          (ws.xr(view, i).transpose() * m.views[view].A[r].flat()).transpose();
  p.labels = labels_vector(data);
  p.offset = image_block_offset(data, m, view, ws);
  p.penalty = {PenaltyKind::ElasticNet, m.penalties.lambda_b, m.penalties.alpha};
  p.warm_start.resize(static_cast<Eigen::Index>(d * R));
  for (std::size_t r = 0; r < R; ++r)
    p.warm_start.segment(static_cast<Eigen::Index>(r * d),
                         static_cast<Eigen::Index>(d)) = m.views[view].B[r].flat();
  return p;
}

PenalizedLogisticProblem build_A_problem(const Dataset& data, const SkpdModel& m,
                                         std::size_t view, const FitWorkspace& ws) {
  if (view >= m.views.size())
    throw std::invalid_argument("build_A_problem: view out of range");
  const std::size_t R = m.rank();
  const std::size_t pdim = m.cfg.p();
  const auto n = static_cast<Eigen::Index>(data.n());
  PenalizedLogisticProblem p;
  p.design.resize(n, static_cast<Eigen::Index>(pdim * R));
  for (std::size_t i = 0; i < data.n(); ++i)
    for (std::size_t r = 0; r < R; ++r)
      p.design.block(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(r * pdim),
                     1, static_cast<Eigen::Index>(pdim)) =
          (ws.xr(view, i) * m.views[view].B[r].flat()).transpose();
  p.labels = labels_vector(data);
  p.offset = image_block_offset(data, m, view, ws);
  p.penalty = {PenaltyKind::L1, m.penalties.lambda_a, 1.0};
  p.warm_start.resize(static_cast<Eigen::Index>(pdim * R));
  for (std::size_t r = 0; r < R; ++r)
    p.warm_start.segment(static_cast<Eigen::Index>(r * pdim),
                         static_cast<Eigen::Index>(pdim)) = m.views[view].A[r].flat();
  return p;
}

PenalizedLogisticProblem build_gamma_problem(const Dataset& data, const SkpdModel& m,
                                             const FitWorkspace& ws,
                                             bool include_intercept) {
  const auto n = static_cast<Eigen::Index>(data.n());
  const auto q = static_cast<Eigen::Index>(data.q());
  PenalizedLogisticProblem p;
  const Eigen::Index cols = q + (include_intercept ? 1 : 0);
  p.design.resize(n, cols);
  if (q > 0) p.design.leftCols(q) = data.z;
  if (include_intercept) p.design.col(cols - 1).setOnes();
  p.labels = labels_vector(data);
  p.offset.resize(n);
  for (std::size_t i = 0; i < data.n(); ++i) {
    double s = 0.0;
    for (std::size_t v = 0; v < m.views.size(); ++v)
      s += bilinear(ws.xr(v, i), m.views[v]);
    p.offset[static_cast<Eigen::Index>(i)] = s;
  }
  p.penalty = {PenaltyKind::L1, m.penalties.lambda_gamma, 1.0};
  p.penalty_weight = Eigen::VectorXd::Ones(cols);
  if (include_intercept) p.penalty_weight[cols - 1] = 0.0;  // intercept unpenalized
  p.warm_start.resize(cols);
  if (q > 0) p.warm_start.head(q) = m.gamma;
  if (include_intercept) p.warm_start[cols - 1] = m.intercept;
  return p;
}

double objective_cached(const SkpdModel& m, const Dataset& data,
                        const FitWorkspace& ws) {
  double loss = 0.0;
  for (std::size_t i = 0; i < data.n(); ++i) {
    const double eta = predictor_cached(m, data, ws, i);
    loss += softplus(eta) - static_cast<double>(data.y[i]) * eta;
  }
  return loss / static_cast<double>(data.n()) + penalty_value(m);
}

std::pair<SkpdModel, FitReport> fit(const Dataset& data, const ShapeConfig& cfg,
                                    std::size_t R, const PenaltyConfig& penalties,
                                    bool use_shift, const SolverConfig& solver) {
  data.validate();
  solver.validate();
  if (data.n() < 2) throw std::invalid_argument("fit: need at least 2 samples");
  if (!data.has_both_classes())
    throw std::invalid_argument("fit: both classes must be present");

  const std::size_t n_views = use_shift ? 2 : 1;
  const ShiftSpec shift_spec = use_shift ? default_shift(cfg) : ShiftSpec{};
  FitWorkspace ws(data, cfg, shift_spec, n_views);

  FitReport report;
  SkpdModel model = initialize(data, cfg, R, use_shift, solver.seed, ws,
                               &report.init_fallback);
  model.penalties = penalties;

  auto record = [&](const std::string& label) {
    const double obj = objective_cached(model, data, ws);
    if (!std::isfinite(obj))
      throw std::runtime_error("fit: objective became non-finite at step " + label);
    report.trace_labels.push_back(label);
    report.objective_trace.push_back(obj);
    return obj;
  };
  double prev_outer = record("init");

  const std::size_t d = cfg.d();
  const std::size_t pdim = cfg.p();
  for (std::size_t t = 0; t < solver.max_outer; ++t) {
    ++report.outer_iterations;
    for (std::size_t v = 0; v < n_views; ++v) {
      {
        auto prob = build_B_problem(data, model, v, ws);
        auto sol = solve_penalized_logistic(prob, solver);
        if (!sol.converged) ++report.inner_nonconverged;
        for (std::size_t r = 0; r < R; ++r)
          model.views[v].B[r].flat() = sol.w.segment(
              static_cast<Eigen::Index>(r * d), static_cast<Eigen::Index>(d));
        record("t" + std::to_string(t) + ".v" + std::to_string(v + 1) + ".B");
      }
      {
        auto prob = build_A_problem(data, model, v, ws);
        auto sol = solve_penalized_logistic(prob, solver);
        if (!sol.converged) ++report.inner_nonconverged;
        for (std::size_t r = 0; r < R; ++r)
          model.views[v].A[r].flat() = sol.w.segment(
              static_cast<Eigen::Index>(r * pdim), static_cast<Eigen::Index>(pdim));
        record("t" + std::to_string(t) + ".v" + std::to_string(v + 1) + ".A");
      }
    }
    {
      auto prob = build_gamma_problem(data, model, ws, true);
      auto sol = solve_penalized_logistic(prob, solver);
      if (!sol.converged) ++report.inner_nonconverged;
      const auto q = static_cast<Eigen::Index>(data.q());
      if (q > 0) model.gamma = sol.w.head(q);
      model.intercept = sol.w[sol.w.size() - 1];
    }
    const double obj = record("t" + std::to_string(t) + ".gamma");
    if (std::abs(prev_outer - obj) <= solver.outer_tol * std::max(1.0, std::abs(prev_outer))) {
      report.converged = true;
      break;
    }
    prev_outer = obj;
  }

  report.final_objective = report.objective_trace.back();
  report.a_nonzeros.resize(n_views);
  for (std::size_t v = 0; v < n_views; ++v)
    for (std::size_t r = 0; r < R; ++r) {
      std::size_t nz = 0;
      for (double val : model.views[v].A[r].data)
        if (val != 0.0) ++nz;
      report.a_nonzeros[v].push_back(nz);
    }

  std::vector<double> proba(data.n());
  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.n(); ++i) {
    proba[i] = sigmoid(predictor_cached(model, data, ws, i));
    const int pred = proba[i] >= 0.5 ? 1 : 0;
    if (pred == data.y[i]) ++correct;
  }
  report.train_accuracy = static_cast<double>(correct) / static_cast<double>(data.n());
  report.train_auc = auc(proba, data.y);
  return {std::move(model), std::move(report)};
}

}  // namespace skpd
