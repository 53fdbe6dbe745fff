#include "aftrack/image_io.hpp"

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include <algorithm>
#include <stdexcept>

namespace aftrack {

Frame read_image(const std::string& path) {
  const cv::Mat img = cv::imread(path, cv::IMREAD_ANYCOLOR);
  if (img.empty()) throw std::runtime_error("cannot read image " + path);
  if (img.depth() != CV_8U || (img.channels() != 1 && img.channels() != 3)) {
    throw std::runtime_error("unsupported pixel format in " + path);
  }
  Frame out(img.cols, img.rows, img.channels());
  for (int y = 0; y < img.rows; ++y) {
    const std::uint8_t* src = img.ptr<std::uint8_t>(y);
    std::uint8_t* dst = out.pixels.data() + static_cast<std::size_t>(y) * img.cols * out.channels;
    if (out.channels == 1) {
      std::copy(src, src + img.cols, dst);
      continue;
    }
    for (int x = 0; x < img.cols; ++x) {
      dst[3 * x + 0] = src[3 * x + 2];
      dst[3 * x + 1] = src[3 * x + 1];
      dst[3 * x + 2] = src[3 * x + 0];
    }
  }
  return out;
}

void write_image(const std::string& path, const Frame& frame) {
  cv::Mat img(frame.height, frame.width, frame.channels == 1 ? CV_8UC1 : CV_8UC3);
  for (int y = 0; y < frame.height; ++y) {
    std::uint8_t* dst = img.ptr<std::uint8_t>(y);
    const std::uint8_t* src = frame.pixels.data() + static_cast<std::size_t>(y) * frame.width * frame.channels;
    if (frame.channels == 1) {
      std::copy(src, src + frame.width, dst);
      continue;
    }
    for (int x = 0; x < frame.width; ++x) {
      dst[3 * x + 0] = src[3 * x + 2];
      dst[3 * x + 1] = src[3 * x + 1];
      dst[3 * x + 2] = src[3 * x + 0];
    }
  }
  if (!cv::imwrite(path, img)) throw std::runtime_error("cannot write image " + path);
}

}  // namespace aftrack
