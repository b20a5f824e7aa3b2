#include "viewfx/augment.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace viewfx {

TrainStage parse_stage(const std::string& name) {
  if (name == "pretrain") return TrainStage::kPretrain;
  if (name == "finetune") return TrainStage::kFinetune;
  if (name == "test") return TrainStage::kTest;
  throw InvalidInputError("unknown training stage: " + name);
}

void AugmentPolicy::validate() const {
  check_input(out_size >= 1, "augment.out_size must be positive");
  check_input(crop_area_min > 0.0 && crop_area_min <= crop_area_max && crop_area_max <= 1.0,
              "augment.crop area range must satisfy 0 < min <= max <= 1");
  const auto prob_ok = [](double p) { return p >= 0.0 && p <= 1.0; };
  check_input(prob_ok(hflip_prob), "augment.hflip_prob must be in [0,1]");
  check_input(prob_ok(grayscale_prob), "augment.grayscale_prob must be in [0,1]");
  check_input(prob_ok(blur_prob), "augment.blur_prob must be in [0,1]");
  check_input(jitter_factor_min <= jitter_factor_max && jitter_factor_min > 0.0,
              "augment.jitter factor range must be positive and ordered");
  check_input(hue_coeff_min <= hue_coeff_max, "augment.hue coefficient range must be ordered");
  check_input(blur_sigma_min > 0.0 && blur_sigma_min <= blur_sigma_max,
              "augment.blur sigma range must be positive and ordered");
}

AugmentPolicy policy_for_stage(TrainStage stage, int out_size) {
  AugmentPolicy p;
  p.out_size = out_size;
  switch (stage) {
    case TrainStage::kPretrain:
      break;  // all five enabled by default
    case TrainStage::kFinetune:
      p.color_jitter_enabled = false;
      p.grayscale_enabled = false;
      p.blur_enabled = false;
      break;
    case TrainStage::kTest:
      p.crop_enabled = false;
      p.hflip_enabled = false;
      p.color_jitter_enabled = false;
      p.grayscale_enabled = false;
      p.blur_enabled = false;
      break;
  }
  return p;
}

namespace {

Image random_resized_crop(const Image& img, const AugmentPolicy& p, RngStream& rng) {
  const double area = rng.uniform(p.crop_area_min, p.crop_area_max);
  double aspect = 1.0;
  if (p.crop_aspect_jitter) {
    aspect = std::exp(rng.uniform(std::log(3.0 / 4.0), std::log(4.0 / 3.0)));
  }
  int ch = static_cast<int>(std::lround(img.height * std::sqrt(area / aspect)));
  int cw = static_cast<int>(std::lround(img.width * std::sqrt(area * aspect)));
  ch = std::clamp(ch, 1, img.height);
  cw = std::clamp(cw, 1, img.width);
  const int top = static_cast<int>(rng.uniform_int(static_cast<uint64_t>(img.height - ch + 1)));
  const int left = static_cast<int>(rng.uniform_int(static_cast<uint64_t>(img.width - cw + 1)));
  return resize_bilinear(crop(img, top, left, ch, cw), p.out_size, p.out_size);
}

void hflip_inplace(Image& img) {
  for (int c = 0; c < img.channels; ++c) {
    for (int y = 0; y < img.height; ++y) {
      for (int x = 0; x < img.width / 2; ++x) {
        std::swap(img.at(c, y, x), img.at(c, y, img.width - 1 - x));
      }
    }
  }
}

void rgb_to_hsv(float r, float g, float b, float& h, float& s, float& v) {
  const float mx = std::max({r, g, b});
  const float mn = std::min({r, g, b});
  v = mx;
  const float d = mx - mn;
  s = mx > 0.0f ? d / mx : 0.0f;
  if (d <= 0.0f) {
    h = 0.0f;
  } else if (mx == r) {
    h = (g - b) / d / 6.0f;
  } else if (mx == g) {
    h = (2.0f + (b - r) / d) / 6.0f;
  } else {
    h = (4.0f + (r - g) / d) / 6.0f;
  }
  if (h < 0.0f) h += 1.0f;
}

void hsv_to_rgb(float h, float s, float v, float& r, float& g, float& b) {
  h = h - std::floor(h);
  const float hh = h * 6.0f;
  const int i = std::min(5, static_cast<int>(hh));
  const float f = hh - i;
  const float p = v * (1.0f - s);
  const float q = v * (1.0f - s * f);
  const float t = v * (1.0f - s * (1.0f - f));
  switch (i) {
    case 0: r = v; g = t; b = p; break;
    case 1: r = q; g = v; b = p; break;
    case 2: r = p; g = v; b = t; break;
    case 3: r = p; g = q; b = v; break;
    case 4: r = t; g = p; b = v; break;
    default: r = v; g = p; b = q; break;
  }
}

void color_jitter_inplace(Image& img, const AugmentPolicy& p, RngStream& rng) {
  // All four coefficients are drawn regardless of channel count so stream
  // consumption does not depend on the input.
  const float fb = static_cast<float>(rng.uniform(p.jitter_factor_min, p.jitter_factor_max));
  const float fc = static_cast<float>(rng.uniform(p.jitter_factor_min, p.jitter_factor_max));
  const float fs = static_cast<float>(rng.uniform(p.jitter_factor_min, p.jitter_factor_max));
  const float fh = static_cast<float>(rng.uniform(p.hue_coeff_min, p.hue_coeff_max));

  for (float& v : img.pixels) v *= fb;

  double mean = 0.0;
  if (img.channels == 1) {
    for (float v : img.pixels) mean += v;
    mean /= img.pixels.size();
  } else {
    const Image gray = to_grayscale(img);
    for (float v : gray.pixels) mean += v;
    mean /= gray.pixels.size();
  }
  const float mu = static_cast<float>(mean);
  for (float& v : img.pixels) v = mu + (v - mu) * fc;

  if (img.channels == 3) {
    const Image gray = to_grayscale(img);
    for (int y = 0; y < img.height; ++y) {
      for (int x = 0; x < img.width; ++x) {
        const float g = gray.at(0, y, x);
        for (int c = 0; c < 3; ++c) {
          img.at(c, y, x) = g + (img.at(c, y, x) - g) * fs;
        }
      }
    }
    // Hue: additive shift of fh/6 of the hue circle.
    for (int y = 0; y < img.height; ++y) {
      for (int x = 0; x < img.width; ++x) {
        float r = std::clamp(img.at(0, y, x), 0.0f, 1.0f);
        float g = std::clamp(img.at(1, y, x), 0.0f, 1.0f);
        float b = std::clamp(img.at(2, y, x), 0.0f, 1.0f);
        float h, s, v;
        rgb_to_hsv(r, g, b, h, s, v);
        hsv_to_rgb(h + fh / 6.0f, s, v, r, g, b);
        img.at(0, y, x) = r;
        img.at(1, y, x) = g;
        img.at(2, y, x) = b;
      }
    }
  }
  for (float& v : img.pixels) v = std::clamp(v, 0.0f, 1.0f);
}

void grayscale_inplace(Image& img) {
  if (img.channels == 1) return;
  const Image gray = to_grayscale(img);
  for (int c = 0; c < img.channels; ++c) {
    for (int y = 0; y < img.height; ++y) {
      for (int x = 0; x < img.width; ++x) {
        img.at(c, y, x) = gray.at(0, y, x);
      }
    }
  }
}

}  // namespace

Image gaussian_blur(const Image& img, double sigma) {
  img.validate();
  check_input(sigma > 0.0, "blur sigma must be positive");
  const int side = std::max(img.height, img.width);
  int ksize = static_cast<int>(std::ceil(0.1 * side));
  if (ksize % 2 == 0) ++ksize;
  ksize = std::max(ksize, 3);
  const int radius = ksize / 2;

  std::vector<float> kernel(ksize);
  double sum = 0.0;
  for (int i = 0; i < ksize; ++i) {
    const double d = i - radius;
    kernel[i] = static_cast<float>(std::exp(-d * d / (2.0 * sigma * sigma)));
    sum += kernel[i];
  }
  for (float& k : kernel) k = static_cast<float>(k / sum);

  Image tmp(img.channels, img.height, img.width);
  for (int c = 0; c < img.channels; ++c) {
    for (int y = 0; y < img.height; ++y) {
      for (int x = 0; x < img.width; ++x) {
        float acc = 0.0f;
        for (int i = -radius; i <= radius; ++i) {
          const int xx = std::clamp(x + i, 0, img.width - 1);
          acc += kernel[i + radius] * img.at(c, y, xx);
        }
        tmp.at(c, y, x) = acc;
      }
    }
  }
  Image out(img.channels, img.height, img.width);
  for (int c = 0; c < img.channels; ++c) {
    for (int y = 0; y < img.height; ++y) {
      for (int x = 0; x < img.width; ++x) {
        float acc = 0.0f;
        for (int i = -radius; i <= radius; ++i) {
          const int yy = std::clamp(y + i, 0, img.height - 1);
          acc += kernel[i + radius] * tmp.at(c, yy, x);
        }
        out.at(c, y, x) = acc;
      }
    }
  }
  return out;
}

Image augment(const Image& img, const AugmentPolicy& policy, RngStream& rng) {
  img.validate();
  policy.validate();

  Image out = policy.crop_enabled ? random_resized_crop(img, policy, rng)
                                  : resize_bilinear(img, policy.out_size, policy.out_size);
  if (policy.hflip_enabled && rng.bernoulli(policy.hflip_prob)) {
    hflip_inplace(out);
  }
  if (policy.color_jitter_enabled) {
    color_jitter_inplace(out, policy, rng);
  }
  if (policy.grayscale_enabled && rng.bernoulli(policy.grayscale_prob)) {
    grayscale_inplace(out);
  }
  if (policy.blur_enabled && rng.bernoulli(policy.blur_prob)) {
    const double sigma = rng.uniform(policy.blur_sigma_min, policy.blur_sigma_max);
    out = gaussian_blur(out, sigma);
  }
  for (float& v : out.pixels) v = std::clamp(v, 0.0f, 1.0f);
  return out;
}

}  // namespace viewfx
