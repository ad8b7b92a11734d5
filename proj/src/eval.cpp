#include "skpd/eval.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "skpd/rng.hpp"

namespace skpd {

double auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size() || scores.empty())
    throw std::invalid_argument("auc: scores and labels must match and be nonempty");
  std::size_t n_pos = 0;
  for (int y : labels) {
    if (y != 0 && y != 1) throw std::invalid_argument("auc: labels must be 0/1");
    n_pos += static_cast<std::size_t>(y);
  }
  const std::size_t n_neg = labels.size() - n_pos;
  if (n_pos == 0 || n_neg == 0)
    throw std::invalid_argument("auc: both classes required");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Midranks over tied score runs, then the Mann-Whitney U statistic.
  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double midrank = 0.5 * static_cast<double>(i + j) + 1.0;  // 1-based
    for (std::size_t t = i; t <= j; ++t)
      if (labels[order[t]] == 1) rank_sum_pos += midrank;
    i = j + 1;
  }
  const double u = rank_sum_pos -
                   0.5 * static_cast<double>(n_pos) * (static_cast<double>(n_pos) + 1.0);
  return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

double accuracy(const std::vector<double>& proba, const std::vector<int>& labels,
                double threshold) {
  if (proba.size() != labels.size() || proba.empty())
    throw std::invalid_argument("accuracy: proba and labels must match and be nonempty");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < proba.size(); ++i)
    if ((proba[i] >= threshold ? 1 : 0) == labels[i]) ++correct;
  return static_cast<double>(correct) / static_cast<double>(proba.size());
}

std::vector<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>>
stratified_kfold(const Dataset& data, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("stratified_kfold: k must be >= 2");
  std::vector<std::vector<std::size_t>> by_class(2);
  for (std::size_t i = 0; i < data.n(); ++i)
    by_class[static_cast<std::size_t>(data.y[i])].push_back(i);
  for (const auto& members : by_class)
    if (members.size() < k)
      throw std::invalid_argument("stratified_kfold: every class needs >= k members");

  Rng rng(seed);
  std::vector<std::vector<std::size_t>> folds(k);
  for (auto& members : by_class) {
    for (std::size_t i = members.size(); i > 1; --i)
      std::swap(members[i - 1], members[rng.below(i)]);
    for (std::size_t i = 0; i < members.size(); ++i)
      folds[i % k].push_back(members[i]);
  }
  std::vector<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> out(k);
  for (std::size_t f = 0; f < k; ++f) {
    auto& [train, valid] = out[f];
    valid = folds[f];
    std::sort(valid.begin(), valid.end());
    for (std::size_t g = 0; g < k; ++g)
      if (g != f) train.insert(train.end(), folds[g].begin(), folds[g].end());
    std::sort(train.begin(), train.end());
  }
  return out;
}

MetricSummary summarize_folds(const std::vector<double>& acc,
                              const std::vector<double>& aucs) {
  MetricSummary s;
  s.fold_acc = acc;
  s.fold_auc = aucs;
  auto mean_sd = [](const std::vector<double>& v, double& mean, double& sd) {
    mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    sd = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
  };
  mean_sd(acc, s.mean_acc, s.sd_acc);
  mean_sd(aucs, s.mean_auc, s.sd_auc);
  return s;
}

MetricSummary cross_validate(const Dataset& data, const ShapeConfig& cfg,
                             std::size_t R, const PenaltyConfig& penalties,
                             bool use_shift, const SolverConfig& solver,
                             std::size_t k, std::uint64_t seed) {
  const auto splits = stratified_kfold(data, k, seed);
  std::vector<double> fold_acc, fold_auc;
  for (const auto& [train_idx, valid_idx] : splits) {
    const Dataset train = data.subset(train_idx);
    const Dataset valid = data.subset(valid_idx);
    auto [model, report] = fit(train, cfg, R, penalties, use_shift, solver);
    std::vector<double> proba(valid.n());
    for (std::size_t i = 0; i < valid.n(); ++i)
      proba[i] = predict_proba(model, valid.x[i],
                               valid.z.row(static_cast<Eigen::Index>(i)));
    fold_acc.push_back(accuracy(proba, valid.y));
    fold_auc.push_back(auc(proba, valid.y));
  }
  return summarize_folds(fold_acc, fold_auc);
}

namespace {

std::string index3_str(const Index3& d) {
  std::ostringstream os;
  os << d[0] << "x" << d[1] << "x" << d[2];
  return os.str();
}

std::string fmt_double(double v) {
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

}  // namespace

std::vector<SweepCellResult> run_sweep(const SweepSpec& spec, std::ostream* progress) {
  const Index3 data_dims = spec.base_sim.signal.values.dims;

  std::vector<ShapeConfig> shapes;
  if (spec.patch_axis.empty())
    shapes.push_back(spec.shape);
  else
    for (const auto& patch : spec.patch_axis)
      shapes.push_back(ShapeConfig::for_full(data_dims, patch));
  const std::vector<double> sigmas =
      spec.sigma_axis.empty() ? std::vector<double>{spec.base_sim.sigma} : spec.sigma_axis;
  const std::vector<int> shifts =
      spec.shift_axis.empty() ? std::vector<int>{spec.use_shift ? 1 : 0} : spec.shift_axis;
  const std::vector<double> las =
      spec.lambda_a_axis.empty() ? std::vector<double>{spec.penalties.lambda_a}
                                 : spec.lambda_a_axis;
  const std::vector<double> lbs =
      spec.lambda_b_axis.empty() ? std::vector<double>{spec.penalties.lambda_b}
                                 : spec.lambda_b_axis;
  const std::vector<double> alphas =
      spec.alpha_axis.empty() ? std::vector<double>{spec.penalties.alpha}
                              : spec.alpha_axis;

  std::vector<SweepCellResult> results;
  for (const auto& shape : shapes)
    for (double sigma : sigmas)
      for (int sh : shifts)
        for (double la : las)
          for (double lb : lbs)
            for (double alpha : alphas) {
              SweepCellResult res;
              auto& cell = res.cell;
              cell.shape = shape;
              cell.sigma = sigma;
              cell.use_shift = sh != 0;
              cell.lambda_a = la;
              cell.lambda_b = lb;
              cell.alpha = alpha;
              cell.key = "patch=" + index3_str(shape.patch) + "|sigma=" +
                         fmt_double(sigma) + "|shift=" + (sh ? "on" : "off") +
                         "|la=" + fmt_double(la) + "|lb=" + fmt_double(lb) +
                         "|alpha=" + fmt_double(alpha);

              // Data and folds depend only on the data-relevant key so e.g.
              // the shift ablation compares models on identical samples.
              const std::string data_key =
                  "template=" + spec.base_sim.signal.name + "|dims=" +
                  index3_str(data_dims) + "|n=" + std::to_string(spec.base_sim.n) +
                  "|sigma=" + fmt_double(sigma) +
                  "|labelnoise=" + fmt_double(spec.base_sim.label_noise_std);
              const std::uint64_t data_seed =
                  fnv1a64(data_key, fnv1a64(std::to_string(spec.seed)));
              const std::uint64_t fold_seed = fnv1a64("folds|" + data_key,
                                                      fnv1a64(std::to_string(spec.seed)));

              if (progress) (*progress) << "[sweep] " << cell.key << std::endl;
              try {
                SimConfig sim = spec.base_sim;
                sim.sigma = sigma;
                sim.seed = data_seed;
                sim.train_fraction = 1.0;  // CV consumes the full draw
                auto [train, test] = generate(sim);
                PenaltyConfig pen(la, lb, spec.penalties.lambda_gamma, alpha);
                res.metrics = cross_validate(train, shape, spec.rank, pen,
                                             cell.use_shift, spec.solver,
                                             spec.folds, fold_seed);
              } catch (const std::exception& e) {
                res.error = e.what();
              }
              results.push_back(std::move(res));
            }
  return results;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepCellResult>& results) {
  os << "key,grid,patch,sigma,shift,lambda_a,lambda_b,alpha,fold,accuracy,auc\n";
  for (const auto& r : results) {
    auto prefix = [&](std::ostream& o) {
      o << r.cell.key << ',' << index3_str(r.cell.shape.grid) << ','
        << index3_str(r.cell.shape.patch) << ',' << fmt_double(r.cell.sigma) << ','
        << (r.cell.use_shift ? "on" : "off") << ',' << fmt_double(r.cell.lambda_a)
        << ',' << fmt_double(r.cell.lambda_b) << ',' << fmt_double(r.cell.alpha) << ',';
    };
    if (!r.error.empty()) {
      prefix(os);
      os << "error,," << '\n';
      continue;
    }
    os << std::setprecision(17);
    for (std::size_t f = 0; f < r.metrics.fold_acc.size(); ++f) {
      prefix(os);
      os << f << ',' << r.metrics.fold_acc[f] << ',' << r.metrics.fold_auc[f] << '\n';
    }
    prefix(os);
    os << "mean," << r.metrics.mean_acc << ',' << r.metrics.mean_auc << '\n';
    prefix(os);
    os << "sd," << r.metrics.sd_acc << ',' << r.metrics.sd_auc << '\n';
  }
}

std::string format_sweep_table(const std::vector<SweepCellResult>& results) {
  std::ostringstream os;
  os << std::left << std::setw(14) << "Grid (A)" << std::setw(14) << "Patch (B)"
     << std::setw(9) << "sigma" << std::setw(7) << "shift" << std::setw(10)
     << "lambda_a" << std::setw(10) << "lambda_b" << std::setw(7) << "alpha"
     << std::setw(22) << "Mean Accuracy (SD)" << "Mean AUC (SD)" << '\n';
  for (const auto& r : results) {
    os << std::left << std::setw(14) << index3_str(r.cell.shape.grid)
       << std::setw(14) << index3_str(r.cell.shape.patch);
    os << std::setw(9) << fmt_double(r.cell.sigma) << std::setw(7)
       << (r.cell.use_shift ? "on" : "off") << std::setw(10)
       << fmt_double(r.cell.lambda_a) << std::setw(10) << fmt_double(r.cell.lambda_b)
       << std::setw(7) << fmt_double(r.cell.alpha);
    if (!r.error.empty()) {
      os << "error: " << r.error << '\n';
      continue;
    }
    std::ostringstream acc, auc_s;
    acc << std::fixed << std::setprecision(4) << r.metrics.mean_acc << " ("
        << r.metrics.sd_acc << ")";
    auc_s << std::fixed << std::setprecision(4) << r.metrics.mean_auc << " ("
          << r.metrics.sd_auc << ")";
    os << std::setw(22) << acc.str() << auc_s.str() << '\n';
  }
  return os.str();
}

}  // namespace skpd
