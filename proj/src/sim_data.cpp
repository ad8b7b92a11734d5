#include "skpd/sim_data.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "skpd/rng.hpp"

namespace skpd {

namespace {

double min2(Index3 d) { return static_cast<double>(std::min(d[0], d[1])); }
double min3(Index3 d) { return static_cast<double>(std::min({d[0], d[1], d[2]})); }

std::vector<TemplateBlob> default_blobs(const std::string& name, Index3 dims) {
  auto at = [&](double f1, double f2, double f3) {
    return std::array<double, 3>{f1 * static_cast<double>(dims[0] - 1),
                                 f2 * static_cast<double>(dims[1] - 1),
                                 f3 * static_cast<double>(dims[2] - 1)};
  };
  auto round_axes = [](double r) { return std::array<double, 3>{r, r, 1.0}; };

  if (name == "disks") {
    const double s = min2(dims);
    return {{at(0.30, 0.28, 0), round_axes(0.11 * s), 0.0},
            {at(0.62, 0.40, 0), round_axes(0.085 * s), 0.0},
            {at(0.45, 0.72, 0), round_axes(0.13 * s), 0.0}};
  }
  if (name == "rings") {
    const double s = min2(dims);
    return {{at(0.38, 0.40, 0), round_axes(0.17 * s), 0.60},
            {at(0.66, 0.68, 0), round_axes(0.21 * s), 0.70}};
  }
  if (name == "lobes") {
    const double s = min2(dims);
    std::vector<TemplateBlob> blobs;
    for (double fi : {0.36, 0.64})
      for (double fj : {0.36, 0.64})
        blobs.push_back({at(fi, fj, 0), {0.155 * s, 0.095 * s, 1.0}, 0.0});
    return blobs;
  }
  if (name == "two_balls" || name == "one_ball") {
    const double s = min3(dims);
    std::vector<TemplateBlob> blobs = {
        {at(0.35, 0.35, 0.35), {0.16 * s, 0.16 * s, 0.16 * s}, 0.0}};
    if (name == "two_balls")
      blobs.push_back({at(0.65, 0.65, 0.65), {0.16 * s, 0.16 * s, 0.16 * s}, 0.0});
    return blobs;
  }
  throw std::invalid_argument("unknown template name: " + name);
}

}  // namespace

SignalTemplate make_template(const std::string& name, Index3 dims,
                             const TemplateParams& params) {
  if (dims[0] == 0 || dims[1] == 0 || dims[2] == 0)
    throw std::invalid_argument("template dims must be >= 1");
  const bool is_2d = name == "disks" || name == "rings" || name == "lobes";
  const bool is_3d = name == "two_balls" || name == "one_ball";
  if (is_2d && dims[2] != 1)
    throw std::invalid_argument("template " + name + " is two-dimensional");
  if (is_3d && dims[2] < 2)
    throw std::invalid_argument("template " + name + " needs a third dimension");
  if (!is_2d && !is_3d && name != "custom")
    throw std::invalid_argument("unknown template name: " + name);

  std::vector<TemplateBlob> blobs = params.blobs;
  if (blobs.empty()) {
    if (name == "custom")
      throw std::invalid_argument("custom template requires explicit blobs");
    blobs = default_blobs(name, dims);
  }
  for (const auto& b : blobs)
    for (int k = 0; k < 3; ++k) {
      const auto kk = static_cast<std::size_t>(k);
      if (b.center[kk] < 0 ||
          b.center[kk] > static_cast<double>(dims[kk] - 1) + 0.5)
        throw std::invalid_argument("template blob center out of bounds");
    }

  SignalTemplate t{name, DenseTensor(dims[0], dims[1], dims[2])};
  for (std::size_t i = 0; i < dims[0]; ++i)
    for (std::size_t j = 0; j < dims[1]; ++j)
      for (std::size_t k = 0; k < dims[2]; ++k) {
        const std::array<double, 3> idx = {static_cast<double>(i),
                                           static_cast<double>(j),
                                           static_cast<double>(k)};
        for (const auto& b : blobs) {
          double s = 0.0;
          bool usable = true;
          for (std::size_t a = 0; a < 3; ++a) {
            if (b.semi_axes[a] <= 0.0) {
              usable = false;
              break;
            }
            const double r = (idx[a] - b.center[a]) / b.semi_axes[a];
            s += r * r;
          }
          if (usable && s < 1.0 && s >= b.inner_frac * b.inner_frac) {
            t.values.at(i, j, k) = 1.0;
            break;
          }
        }
      }
  return t;
}

void SimConfig::validate() const {
  if (n < 2 || n % 2 != 0)
    throw std::invalid_argument("SimConfig: n must be even and >= 2");
  if (sigma < 0 || label_noise_std < 0)
    throw std::invalid_argument("SimConfig: noise levels must be >= 0");
  if (train_fraction < 0.0 || train_fraction > 1.0)
    throw std::invalid_argument("SimConfig: train_fraction must be in [0,1]");
  if (class0 && class0->values.dims != signal.values.dims)
    throw std::invalid_argument("SimConfig: class templates must share dims");
}

std::pair<Dataset, Dataset> generate(const SimConfig& cfg) {
  cfg.validate();
  const Index3 dims = cfg.signal.values.dims;
  const std::size_t n = cfg.n;
  Rng rng(cfg.seed);

  DenseTensor diff = cfg.signal.values;
  if (cfg.class0) diff.flat() -= cfg.class0->values.flat();

  Dataset all;
  all.x.reserve(n);
  all.z.resize(static_cast<Eigen::Index>(n), 0);
  all.y.assign(n, 0);

  std::vector<double> raw(n);
  for (std::size_t i = 0; i < n; ++i) {
    const bool in_signal_group = i < n / 2;
    DenseTensor x(dims[0], dims[1], dims[2]);
    if (in_signal_group)
      x.flat() = cfg.signal.values.flat();
    else if (cfg.class0)
      x.flat() = cfg.class0->values.flat();
    if (cfg.sigma > 0)
      for (auto& v : x.data) v += cfg.sigma * rng.normal();
    raw[i] = inner(x, diff);
    all.x.push_back(std::move(x));
  }

  // Label assignment: standardized score through the sigmoid, threshold 0.5.
  std::vector<int> labels(n);
  bool ok = false;
  for (int attempt = 0; attempt < 10 && !ok; ++attempt) {
    std::vector<double> s(raw);
    if (cfg.label_noise_std > 0)
      for (auto& v : s) v += cfg.label_noise_std * rng.normal();
    double mean = 0.0;
    for (double v : s) mean += v;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double v : s) var += (v - mean) * (v - mean);
    var /= static_cast<double>(n);
    const double sd = std::sqrt(var);
    bool pos = false, neg = false;
    for (std::size_t i = 0; i < n; ++i) {
      const double std_score = sd > 0 ? (s[i] - mean) / sd : 0.0;
      labels[i] = sigmoid(std_score) >= 0.5 ? 1 : 0;
      (labels[i] == 1 ? pos : neg) = true;
    }
    ok = pos && neg;
  }
  if (!ok)
    throw std::runtime_error(
        "generate: labels degenerate to a single class after 10 attempts");
  all.y = labels;

  // Stratified train/test split.
  std::vector<std::size_t> train_idx, test_idx;
  for (int cls : {1, 0}) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < n; ++i)
      if (all.y[i] == cls) members.push_back(i);
    for (std::size_t i = members.size(); i > 1; --i)
      std::swap(members[i - 1], members[rng.below(i)]);
    const auto n_train = static_cast<std::size_t>(
        std::llround(cfg.train_fraction * static_cast<double>(members.size())));
    for (std::size_t i = 0; i < members.size(); ++i)
      (i < n_train ? train_idx : test_idx).push_back(members[i]);
  }
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(test_idx.begin(), test_idx.end());
  return {all.subset(train_idx), all.subset(test_idx)};
}

}  // namespace skpd
