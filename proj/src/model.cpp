#include "skpd/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace skpd {

PenaltyConfig::PenaltyConfig(double la, double lb, double lg, double a)
    : lambda_a(la), lambda_b(lb), lambda_gamma(lg), alpha(std::clamp(a, 0.0, 1.0)) {
  if (la < 0 || lb < 0 || lg < 0)
    throw std::invalid_argument("penalty lambdas must be non-negative");
}

void FactorSet::validate(const ShapeConfig& cfg) const {
  if (A.size() != B.size() || A.empty())
    throw std::invalid_argument("FactorSet: A and B must have equal nonzero length");
  for (const auto& a : A)
    if (a.dims != cfg.grid)
      throw std::invalid_argument("FactorSet: A dims do not match grid");
  for (const auto& b : B)
    if (b.dims != cfg.patch)
      throw std::invalid_argument("FactorSet: B dims do not match patch");
}

void SkpdModel::validate() const {
  if (views.empty() || views.size() > 2)
    throw std::invalid_argument("SkpdModel: views must be 1 or 2");
  for (const auto& v : views) v.validate(cfg);
  if (views.size() == 2 && views[0].rank() != views[1].rank())
    throw std::invalid_argument("SkpdModel: both views must share the same rank");
}

void Dataset::validate() const {
  if (static_cast<std::size_t>(z.rows()) != x.size() || y.size() != x.size())
    throw std::invalid_argument("Dataset: x, z, y lengths differ");
  for (const auto& t : x)
    if (t.dims != dims()) throw std::invalid_argument("Dataset: non-uniform tensor dims");
  for (int label : y)
    if (label != 0 && label != 1)
      throw std::invalid_argument("Dataset: labels must be in {0,1}");
}

Dataset Dataset::subset(const std::vector<std::size_t>& idx) const {
  Dataset out;
  out.x.reserve(idx.size());
  out.z.resize(static_cast<Eigen::Index>(idx.size()), z.cols());
  out.y.reserve(idx.size());
  for (std::size_t r = 0; r < idx.size(); ++r) {
    out.x.push_back(x[idx[r]]);
    out.z.row(static_cast<Eigen::Index>(r)) = z.row(static_cast<Eigen::Index>(idx[r]));
    out.y.push_back(y[idx[r]]);
  }
  return out;
}

bool Dataset::has_both_classes() const {
  bool pos = false, neg = false;
  for (int label : y) (label == 1 ? pos : neg) = true;
  return pos && neg;
}

DenseTensor coefficient_tensor(const SkpdModel& m, std::size_t view) {
  if (view >= m.views.size())
    throw std::invalid_argument("coefficient_tensor: view index out of range");
  const auto& fs = m.views[view];
  const Index3 full = m.cfg.full();
  DenseTensor c(full[0], full[1], full[2]);
  for (std::size_t r = 0; r < fs.rank(); ++r) {
    const DenseTensor term = kron(fs.A[r], fs.B[r]);
    c.flat() += term.flat();
  }
  return c;
}

namespace {

double bilinear_view(const Eigen::MatrixXd& xr, const FactorSet& fs) {
  double s = 0.0;
  for (std::size_t r = 0; r < fs.rank(); ++r)
    s += fs.A[r].flat().dot(xr * fs.B[r].flat());
  return s;
}

}  // namespace

double linear_predictor(const SkpdModel& m, const DenseTensor& x,
                        const Eigen::VectorXd& z) {
  if (x.dims != m.cfg.full())
    throw std::invalid_argument("linear_predictor: tensor dims do not match model");
  if (z.size() != m.gamma.size())
    throw std::invalid_argument("linear_predictor: covariate length does not match gamma");
  double eta = bilinear_view(rearrange(x, m.cfg), m.views[0]);
  if (m.views.size() == 2)
    eta += bilinear_view(rearrange(shift(x, m.shift_spec), m.cfg), m.views[1]);
  if (z.size() > 0) eta += z.dot(m.gamma);
  return eta + m.intercept;
}

double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

double softplus(double t) {
  if (t > 0.0) return t + std::log1p(std::exp(-t));
  return std::log1p(std::exp(t));
}

double predict_proba(const SkpdModel& m, const DenseTensor& x,
                     const Eigen::VectorXd& z) {
  return sigmoid(linear_predictor(m, x, z));
}

int classify(const SkpdModel& m, const DenseTensor& x, const Eigen::VectorXd& z,
             double threshold) {
  if (threshold <= 0.0 || threshold >= 1.0)
    throw std::invalid_argument("classify: threshold must be in (0,1)");
  return predict_proba(m, x, z) >= threshold ? 1 : 0;
}

double penalty_value(const SkpdModel& m) {
  const auto& pen = m.penalties;
  double s = 0.0;
  for (const auto& fs : m.views)
    for (std::size_t r = 0; r < fs.rank(); ++r) {
      s += pen.lambda_a * fs.A[r].flat().lpNorm<1>();
      const double b1 = fs.B[r].flat().lpNorm<1>();
      const double b2 = fs.B[r].flat().squaredNorm();
      s += pen.lambda_b * (pen.alpha * b1 + (1.0 - pen.alpha) * b2);
    }
  if (m.gamma.size() > 0) s += pen.lambda_gamma * m.gamma.lpNorm<1>();
  return s;
}

double objective(const SkpdModel& m, const Dataset& data) {
  if (data.n() == 0) throw std::invalid_argument("objective: dataset is empty");
  double loss = 0.0;
  for (std::size_t i = 0; i < data.n(); ++i) {
    const double eta =
        linear_predictor(m, data.x[i], data.z.row(static_cast<Eigen::Index>(i)));
    loss += softplus(eta) - static_cast<double>(data.y[i]) * eta;
  }
  return loss / static_cast<double>(data.n()) + penalty_value(m);
}

// ---------------------------------------------------------------------------
// Serialization: little-endian flat container.

namespace {

constexpr char kMagic[4] = {'S', 'K', 'P', 'D'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ostream& os, T v) {
  static_assert(std::is_trivially_copyable_v<T>);
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  os.write(buf, sizeof(T));
}

template <typename T>
T get(std::istream& is) {
  char buf[sizeof(T)];
  is.read(buf, sizeof(T));
  if (!is) throw std::runtime_error("model file truncated");
  T v;
  std::memcpy(&v, buf, sizeof(T));
  return v;
}

void put_dims(std::ostream& os, const Index3& d) {
  for (auto v : d) put<std::uint32_t>(os, static_cast<std::uint32_t>(v));
}

Index3 get_dims(std::istream& is) {
  Index3 d;
  for (auto& v : d) v = get<std::uint32_t>(is);
  return d;
}

void put_tensor(std::ostream& os, const DenseTensor& t) {
  put_dims(os, t.dims);
  for (double v : t.data) put<double>(os, v);
}

DenseTensor get_tensor(std::istream& is) {
  const Index3 d = get_dims(is);
  DenseTensor t(d[0], d[1], d[2]);
  for (auto& v : t.data) v = get<double>(is);
  t.check_finite();
  return t;
}

}  // namespace

void save_model(const std::string& path, const SkpdModel& m) {
  m.validate();
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open model file for writing: " + path);
  os.write(kMagic, 4);
  put<std::uint32_t>(os, kVersion);
  put_dims(os, m.cfg.grid);
  put_dims(os, m.cfg.patch);
  put_dims(os, m.shift_spec.offsets);
  put<std::uint8_t>(os, static_cast<std::uint8_t>(m.views.size()));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(m.rank()));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(m.gamma.size()));
  put<double>(os, m.penalties.lambda_a);
  put<double>(os, m.penalties.lambda_b);
  put<double>(os, m.penalties.lambda_gamma);
  put<double>(os, m.penalties.alpha);
  for (const auto& fs : m.views)
    for (std::size_t r = 0; r < fs.rank(); ++r) {
      put_tensor(os, fs.A[r]);
      put_tensor(os, fs.B[r]);
    }
  for (Eigen::Index i = 0; i < m.gamma.size(); ++i) put<double>(os, m.gamma[i]);
  put<double>(os, m.intercept);
  if (!os) throw std::runtime_error("write failure on model file: " + path);
}

SkpdModel load_model(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open model file: " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("not an SKPD model file: " + path);
  if (get<std::uint32_t>(is) != kVersion)
    throw std::runtime_error("unsupported model version in " + path);

  SkpdModel m;
  const Index3 grid = get_dims(is);
  const Index3 patch = get_dims(is);
  m.cfg = ShapeConfig(grid, patch);
  m.shift_spec.offsets = get_dims(is);
  const auto n_views = get<std::uint8_t>(is);
  const auto rank = get<std::uint32_t>(is);
  const auto q = get<std::uint32_t>(is);
  const double la = get<double>(is);
  const double lb = get<double>(is);
  const double lg = get<double>(is);
  const double alpha = get<double>(is);
  m.penalties = PenaltyConfig(la, lb, lg, alpha);
  m.views.resize(n_views);
  for (auto& fs : m.views)
    for (std::uint32_t r = 0; r < rank; ++r) {
      fs.A.push_back(get_tensor(is));
      fs.B.push_back(get_tensor(is));
    }
  m.gamma.resize(q);
  for (std::uint32_t i = 0; i < q; ++i) m.gamma[static_cast<Eigen::Index>(i)] = get<double>(is);
  m.intercept = get<double>(is);
  m.validate();
  return m;
}

}  // namespace skpd
