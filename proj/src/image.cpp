#include "viewfx/image.hpp"

#include <algorithm>
#include <cmath>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

namespace viewfx {

Image::Image(int c, int h, int w, float fill) : channels(c), height(h), width(w) {
  check_input(c >= 1 && h >= 1 && w >= 1, "image dimensions must be positive");
  pixels.assign(static_cast<size_t>(c) * h * w, fill);
}

void Image::validate() const {
  check_input(channels >= 1 && height >= 1 && width >= 1, "image dimensions must be positive");
  check_input(pixels.size() == static_cast<size_t>(channels) * height * width,
              "pixel buffer size does not match dimensions");
}

Image resize_bilinear(const Image& img, int out_h, int out_w) {
  img.validate();
  check_input(out_h >= 1 && out_w >= 1, "resize target must be positive");
  if (out_h == img.height && out_w == img.width) return img;

  Image out(img.channels, out_h, out_w);
  const double sy = static_cast<double>(img.height) / out_h;
  const double sx = static_cast<double>(img.width) / out_w;
  for (int y = 0; y < out_h; ++y) {
    const double src_y = std::clamp((y + 0.5) * sy - 0.5, 0.0, img.height - 1.0);
    const int y0 = static_cast<int>(src_y);
    const int y1 = std::min(y0 + 1, img.height - 1);
    const float fy = static_cast<float>(src_y - y0);
    for (int x = 0; x < out_w; ++x) {
      const double src_x = std::clamp((x + 0.5) * sx - 0.5, 0.0, img.width - 1.0);
      const int x0 = static_cast<int>(src_x);
      const int x1 = std::min(x0 + 1, img.width - 1);
      const float fx = static_cast<float>(src_x - x0);
      for (int c = 0; c < img.channels; ++c) {
        const float top = img.at(c, y0, x0) * (1.0f - fx) + img.at(c, y0, x1) * fx;
        const float bot = img.at(c, y1, x0) * (1.0f - fx) + img.at(c, y1, x1) * fx;
        out.at(c, y, x) = top * (1.0f - fy) + bot * fy;
      }
    }
  }
  return out;
}

Image crop(const Image& img, int top, int left, int h, int w) {
  img.validate();
  check_input(h >= 1 && w >= 1, "crop window must be positive");
  check_input(top >= 0 && left >= 0 && top + h <= img.height && left + w <= img.width,
              "crop window leaves the image bounds");
  Image out(img.channels, h, w);
  for (int c = 0; c < img.channels; ++c) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        out.at(c, y, x) = img.at(c, top + y, left + x);
      }
    }
  }
  return out;
}

Image read_png(const std::string& path) {
  const cv::Mat raw = cv::imread(path, cv::IMREAD_UNCHANGED);
  if (raw.empty()) {
    throw ParseError("cannot read image file: " + path);
  }
  const int channels = raw.channels() == 1 ? 1 : 3;
  cv::Mat m;
  if (raw.channels() == 1) {
    m = raw;
  } else if (raw.channels() == 3) {
    cv::cvtColor(raw, m, cv::COLOR_BGR2RGB);
  } else if (raw.channels() == 4) {
    cv::cvtColor(raw, m, cv::COLOR_BGRA2RGB);
  } else {
    throw ParseError("unsupported channel count in " + path);
  }
  if (m.depth() != CV_8U) {
    throw ParseError("unsupported bit depth in " + path + " (expect 8-bit)");
  }

  Image out(channels, m.rows, m.cols);
  for (int y = 0; y < m.rows; ++y) {
    const uint8_t* row = m.ptr<uint8_t>(y);
    for (int x = 0; x < m.cols; ++x) {
      for (int c = 0; c < channels; ++c) {
        out.at(c, y, x) = static_cast<float>(row[x * channels + c]) / 255.0f;
      }
    }
  }
  return out;
}

void write_png(const Image& img, const std::string& path) {
  img.validate();
  check_input(img.channels == 1 || img.channels == 3,
              "png writer supports 1 or 3 channels");
  cv::Mat m(img.height, img.width, img.channels == 1 ? CV_8UC1 : CV_8UC3);
  for (int y = 0; y < img.height; ++y) {
    uint8_t* row = m.ptr<uint8_t>(y);
    for (int x = 0; x < img.width; ++x) {
      for (int c = 0; c < img.channels; ++c) {
        const float v = std::clamp(img.at(c, y, x), 0.0f, 1.0f);
        // RGB -> BGR for OpenCV's writer.
        const int oc = img.channels == 3 ? 2 - c : 0;
        row[x * img.channels + oc] = static_cast<uint8_t>(std::lround(v * 255.0f));
      }
    }
  }
  if (!cv::imwrite(path, m)) {
    throw std::runtime_error("cannot write image file: " + path);
  }
}

Image to_grayscale(const Image& img) {
  img.validate();
  if (img.channels == 1) return img;
  check_input(img.channels == 3, "grayscale conversion expects 1 or 3 channels");
  Image out(1, img.height, img.width);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      out.at(0, y, x) =
          0.299f * img.at(0, y, x) + 0.587f * img.at(1, y, x) + 0.114f * img.at(2, y, x);
    }
  }
  return out;
}

}  // namespace viewfx
