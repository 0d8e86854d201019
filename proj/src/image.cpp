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

#include "fiberqc/image.hpp"

#include <algorithm>
#include <numeric>

#include "fiberqc/error.hpp"
#include "fiberqc/rng.hpp"

namespace fiberqc {

Image Image::zeros(int width, int height) {
  require_parameter(width > 0 && height > 0, "image size must be positive");
  Image img;
  img.width = width;
  img.height = height;
  img.pixels.assign(static_cast<std::size_t>(width) * height, 0.0);
  return img;
}

double Image::max_value() const {
  return pixels.empty() ? 0.0 : *std::max_element(pixels.begin(), pixels.end());
}

double Image::sum() const {
  return std::accumulate(pixels.begin(), pixels.end(), 0.0);
}

Image with_noise(const Image& image, double sigma, std::uint64_t seed) {
  require_parameter(sigma >= 0.0, "noise sigma must be >= 0");
  Image out = image;
  Rng rng = make_rng(seed);
  std::normal_distribution<double> n(0.0, sigma);
  for (auto& p : out.pixels) p += n(rng);
  return out;
}

}  // namespace fiberqc
