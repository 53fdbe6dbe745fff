#pragma once

#include <string>

#include "aftrack/image.hpp"

namespace aftrack {

/// Decodes an image file into an RGB frame, or a single-channel frame for
/// grayscale files. Throws std::runtime_error on failure.
Frame read_image(const std::string& path);

/// Encodes a frame; the format follows the file extension.
void write_image(const std::string& path, const Frame& frame);

}  // namespace aftrack
