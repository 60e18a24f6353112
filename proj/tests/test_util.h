// Copyright 2026 The txc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TXC_TESTS_TEST_UTIL_H_
#define TXC_TESTS_TEST_UTIL_H_

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <string>
#include <vector>

#include "txc/frame.h"
#include "txc/texture_mask.h"

namespace txc::test {

inline Frame RandomFrame(int width, int height, std::mt19937_64& rng) {
  Frame f = Frame::Blank(width, height);
  std::uniform_int_distribution<int> d(0, 255);
  for (Plane* p : {&f.y, &f.u, &f.v}) {
    for (auto& s : p->samples) s = static_cast<uint8_t>(d(rng));
  }
  return f;
}

// Luma equal to x (mod 256), flat chroma.
inline Frame RampFrame(int width, int height) {
  Frame f = Frame::Blank(width, height, 0, 128);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) f.y.at(x, y) = static_cast<uint8_t>(x);
  }
  return f;
}

// Smooth random field: bilinear interpolation of a coarse random lattice.
inline Frame SmoothRandomFrame(int width, int height, int cell,
                               std::mt19937_64& rng) {
  const int gw = width / cell + 2;
  const int gh = height / cell + 2;
  std::uniform_real_distribution<double> d(30, 225);
  std::vector<double> lattice(static_cast<size_t>(gw) * gh);
  for (auto& v : lattice) v = d(rng);
  Frame f = Frame::Blank(width, height, 0, 128);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const double u = static_cast<double>(x) / cell;
      const double v = static_cast<double>(y) / cell;
      const int i = static_cast<int>(u);
      const int j = static_cast<int>(v);
      const double fu = u - i;
      const double fv = v - j;
      auto at = [&](int a, int b) { return lattice[b * gw + a]; };
      const double s = (1 - fu) * (1 - fv) * at(i, j) +
                       fu * (1 - fv) * at(i + 1, j) +
                       (1 - fu) * fv * at(i, j + 1) + fu * fv * at(i + 1, j + 1);
      f.y.at(x, y) = static_cast<uint8_t>(s + 0.5);
    }
  }
  for (int y = 0; y < f.u.height; ++y) {
    for (int x = 0; x < f.u.width; ++x) {
      f.u.at(x, y) = static_cast<uint8_t>(96 + f.y.at(2 * x, 2 * y) / 4);
      f.v.at(x, y) = static_cast<uint8_t>(160 - f.y.at(2 * x, 2 * y) / 8);
    }
  }
  return f;
}

inline TextureMask RandomMask(int grid_w, int grid_h, double texture_prob,
                              std::mt19937_64& rng) {
  TextureMask m = TextureMask::Uniform(grid_w, grid_h, BlockLabel::kNonTexture);
  std::bernoulli_distribution d(texture_prob);
  for (int by = 0; by < grid_h; ++by) {
    for (int bx = 0; bx < grid_w; ++bx) {
      if (d(rng)) m.Set(bx, by, BlockLabel::kTexture);
    }
  }
  return m;
}

inline std::vector<uint8_t> ReadBytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::string ReadText(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void WriteBytes(const std::filesystem::path& path,
                       const std::vector<uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "tmp") {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("txc_" + tag + "_" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::string operator/(const std::string& name) const {
    return (path_ / name).string();
  }

 private:
  std::filesystem::path path_;
};

inline std::filesystem::path SourcePath(const std::string& relative) {
  return std::filesystem::path(TXC_SOURCE_DIR) / relative;
}

}  // namespace txc::test

#endif  // TXC_TESTS_TEST_UTIL_H_
