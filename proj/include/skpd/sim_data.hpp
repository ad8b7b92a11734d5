// Synthetic shape datasets: signal templates, signal-plus-noise sampling and
// score-based label assignment.
#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "skpd/model.hpp"

namespace skpd {

/// One ellipsoidal component of a template, in voxel units. inner_frac > 0
/// hollows the shape into an annulus/shell.
struct TemplateBlob {
  std::array<double, 3> center{0, 0, 0};
  std::array<double, 3> semi_axes{0, 0, 0};
  double inner_frac = 0.0;
};

struct TemplateParams {
  std::vector<TemplateBlob> blobs;  // required for "custom", overrides defaults otherwise
};

struct SignalTemplate {
  std::string name;
  DenseTensor values;  // in [0,1]
};

/// Procedural rasterization of the named template family:
///   disks  - three filled circles (2D)
///   rings  - two annuli (2D)
///   lobes  - four mirrored ellipses (2D)
///   two_balls / one_ball - spheres (3D)
///   custom - caller-supplied blobs
/// A voxel is inside a blob when sum(((idx-c)/a)^2) < 1 strictly, so a
/// zero-radius shape rasterizes to an all-zero template.
SignalTemplate make_template(const std::string& name, Index3 dims,
                             const TemplateParams& params = {});

struct SimConfig {
  SignalTemplate signal;                   // class-1 base tensor
  std::optional<SignalTemplate> class0;    // class-0 base tensor; default zero
  std::size_t n = 0;                       // total samples, even
  double sigma = 1.0;                      // voxel noise std dev
  double label_noise_std = 1.0;            // score noise std dev
  std::uint64_t seed = 1;
  double train_fraction = 0.8;

  void validate() const;
};

/// Draws X_i = base(class) + sigma * N(0,1) per voxel, computes raw scores
/// t_i = <X_i, signal - class0> + eps with eps ~ N(0, label_noise_std^2),
/// standardizes the scores over the batch and labels 1 where the sigmoid of
/// the standardized score is >= 0.5. Degenerate one-class label draws
/// re-sample eps up to 10 times before failing. The split is stratified by
/// label. Bit-identical output for identical configs.
std::pair<Dataset, Dataset> generate(const SimConfig& cfg);

}  // namespace skpd
