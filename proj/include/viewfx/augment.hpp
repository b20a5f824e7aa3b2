#pragma once

#include <string>

#include "viewfx/image.hpp"
#include "viewfx/rng.hpp"

namespace viewfx {

enum class TrainStage { kPretrain, kFinetune, kTest };

TrainStage parse_stage(const std::string& name);

/// Stochastic augmentation policy. Sub-augmentations apply in the fixed order
/// RC -> HF -> CJ -> GS -> GB; the output is always resized to out_size.
struct AugmentPolicy {
  int out_size = 32;

  bool crop_enabled = true;
  double crop_area_min = 0.2;
  double crop_area_max = 1.0;
  bool crop_aspect_jitter = false;  // aspect ratio fixed to source by default

  bool hflip_enabled = true;
  double hflip_prob = 0.5;

  bool color_jitter_enabled = true;
  double jitter_factor_min = 0.4;  // brightness / contrast / saturation
  double jitter_factor_max = 1.0;
  double hue_coeff_min = 0.2;
  double hue_coeff_max = 1.0;

  bool grayscale_enabled = true;
  double grayscale_prob = 0.2;

  bool blur_enabled = true;
  double blur_prob = 0.5;
  double blur_sigma_min = 0.1;
  double blur_sigma_max = 2.0;

  void validate() const;
};

/// Stage policies: pretrain enables all five augmentations, finetune keeps
/// only crop and flip, test is resize-only.
AugmentPolicy policy_for_stage(TrainStage stage, int out_size);

/// Applies the policy with all randomness drawn from `rng`. Output pixel
/// values are clamped to [0,1].
Image augment(const Image& img, const AugmentPolicy& policy, RngStream& rng);

/// Gaussian blur with clamp-to-edge padding; kernel size is 10% of the image
/// side, rounded up to odd.
Image gaussian_blur(const Image& img, double sigma);

}  // namespace viewfx
