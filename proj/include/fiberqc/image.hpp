// Copyright 2026 The fiberqc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FIBERQC_IMAGE_HPP
#define FIBERQC_IMAGE_HPP

#include <cstdint>
#include <vector>

#include "fiberqc/linalg.hpp"

namespace fiberqc {

/// Row-major grayscale intensity image (camera-style rendering target).
struct Image {
  int width = 0;
  int height = 0;
  std::vector<double> pixels;  // size width * height

  static Image zeros(int width, int height);

  double& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
  double at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }

  double max_value() const;
  double sum() const;
};

/// Adds i.i.d. Gaussian pixel noise with the given standard deviation.
Image with_noise(const Image& image, double sigma, std::uint64_t seed);

}  // namespace fiberqc

#endif  // FIBERQC_IMAGE_HPP
