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

#include "txc/texture_mask.h"

#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "txc/error.h"

namespace txc {

TextureMask TextureMask::Uniform(int grid_w, int grid_h, BlockLabel label) {
  TextureMask m;
  m.grid_w = grid_w;
  m.grid_h = grid_h;
  const size_t n = static_cast<size_t>(grid_w) * grid_h;
  m.labels.assign(n, label);
  m.probs.assign(n, label == BlockLabel::kTexture ? 1.0f : 0.0f);
  return m;
}

TextureMask TextureMask::ForFrame(const Frame& frame, BlockLabel label) {
  if (!frame.IsGridAligned()) throw Error("frame is not padded to 16");
  return Uniform(frame.width() / kBlockGrid, frame.height() / kBlockGrid,
                 label);
}

int TextureMask::TextureCount() const {
  int n = 0;
  for (BlockLabel l : labels) n += l == BlockLabel::kTexture;
  return n;
}

TextureMask CleanMask(const TextureMask& mask, int min_region_blocks) {
  if (min_region_blocks < 0) throw Error("min_region_blocks must be >= 0");
  TextureMask out = mask;
  if (min_region_blocks <= 1) return out;
  std::vector<int> component(mask.labels.size(), -1);
  std::vector<int> stack;
  std::vector<int> members;
  int next_id = 0;
  for (int start = 0; start < static_cast<int>(mask.labels.size()); ++start) {
    if (mask.labels[start] != BlockLabel::kTexture || component[start] >= 0) {
      continue;
    }
    members.clear();
    stack.assign(1, start);
    component[start] = next_id;
    while (!stack.empty()) {
      const int cur = stack.back();
      stack.pop_back();
      members.push_back(cur);
      const int cx = cur % mask.grid_w;
      const int cy = cur / mask.grid_w;
      const int nbrs[4][2] = {{cx - 1, cy}, {cx + 1, cy}, {cx, cy - 1},
                              {cx, cy + 1}};
      for (const auto& nb : nbrs) {
        if (nb[0] < 0 || nb[1] < 0 || nb[0] >= mask.grid_w ||
            nb[1] >= mask.grid_h) {
          continue;
        }
        const int idx = nb[1] * mask.grid_w + nb[0];
        if (mask.labels[idx] == BlockLabel::kTexture && component[idx] < 0) {
          component[idx] = next_id;
          stack.push_back(idx);
        }
      }
    }
    if (static_cast<int>(members.size()) < min_region_blocks) {
      for (int idx : members) out.labels[idx] = BlockLabel::kNonTexture;
    }
    ++next_id;
  }
  return out;
}

void WriteMaskPgm(const TextureMask& mask, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << "P5\n" << mask.grid_w << " " << mask.grid_h << "\n255\n";
  for (BlockLabel l : mask.labels) {
    out.put(static_cast<char>(l == BlockLabel::kTexture ? 255 : 0));
  }
  if (!out) throw Error("failed to write " + path.string());
}

namespace {

// Next whitespace-delimited PGM header token, skipping '#' comments.
std::string PgmToken(std::istream& in) {
  std::string tok;
  while (in >> tok) {
    if (tok[0] != '#') return tok;
    std::string rest;
    std::getline(in, rest);
  }
  throw Error("truncated PGM header");
}

}  // namespace

TextureMask ReadMaskPgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open mask " + path.string());
  if (PgmToken(in) != "P5") throw Error(path.string() + ": not a P5 PGM");
  TextureMask m;
  try {
    m.grid_w = std::stoi(PgmToken(in));
    m.grid_h = std::stoi(PgmToken(in));
    if (std::stoi(PgmToken(in)) != 255) throw Error("maxval must be 255");
  } catch (const std::logic_error&) {
    throw Error(path.string() + ": malformed PGM header");
  }
  if (m.grid_w <= 0 || m.grid_h <= 0) throw Error("empty mask");
  in.get();  // single whitespace before the raster
  const size_t n = static_cast<size_t>(m.grid_w) * m.grid_h;
  std::vector<char> raw(n);
  in.read(raw.data(), static_cast<std::streamsize>(n));
  if (static_cast<size_t>(in.gcount()) != n) {
    throw Error(path.string() + ": truncated raster");
  }
  for (char c : raw) {
    m.labels.push_back(static_cast<unsigned char>(c) >= 128
                           ? BlockLabel::kTexture
                           : BlockLabel::kNonTexture);
  }
  for (BlockLabel l : m.labels) {
    m.probs.push_back(l == BlockLabel::kTexture ? 1.0f : 0.0f);
  }
  return m;
}

void WriteMaskProbs(const TextureMask& mask, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << mask.grid_w << " " << mask.grid_h << "\n";
  out << std::setprecision(9);
  for (int y = 0; y < mask.grid_h; ++y) {
    for (int x = 0; x < mask.grid_w; ++x) {
      if (x) out << ' ';
      out << mask.probs[static_cast<size_t>(y) * mask.grid_w + x];
    }
    out << "\n";
  }
}

void ReadMaskProbs(TextureMask& mask, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  int w = 0;
  int h = 0;
  in >> w >> h;
  if (w != mask.grid_w || h != mask.grid_h) {
    throw Error(path.string() + ": probability grid does not match mask");
  }
  for (float& p : mask.probs) {
    if (!(in >> p)) throw Error(path.string() + ": truncated probabilities");
  }
}

std::filesystem::path MaskPath(const std::filesystem::path& dir,
                               const std::string& stem, int index) {
  return dir / (stem + ".mask." + std::to_string(index) + ".pgm");
}

std::filesystem::path MaskProbsPath(const std::filesystem::path& dir,
                                    const std::string& stem, int index) {
  return dir / (stem + ".mask." + std::to_string(index) + ".txt");
}

void WriteMasks(const std::vector<TextureMask>& masks,
                const std::filesystem::path& dir, const std::string& stem) {
  std::filesystem::create_directories(dir);
  for (size_t i = 0; i < masks.size(); ++i) {
    WriteMaskPgm(masks[i], MaskPath(dir, stem, static_cast<int>(i)));
    WriteMaskProbs(masks[i], MaskProbsPath(dir, stem, static_cast<int>(i)));
  }
}

std::vector<TextureMask> LoadMasks(const std::filesystem::path& dir,
                                   const std::string& stem, int count) {
  std::string use_stem = stem;
  if (!std::filesystem::exists(MaskPath(dir, stem, 0))) {
    std::set<std::string> stems;
    if (std::filesystem::is_directory(dir)) {
      for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        const auto pos = name.find(".mask.0.pgm");
        if (pos != std::string::npos && pos + 11 == name.size()) {
          stems.insert(name.substr(0, pos));
        }
      }
    }
    if (stems.size() != 1) {
      throw Error("no masks for '" + stem + "' in " + dir.string());
    }
    use_stem = *stems.begin();
  }
  std::vector<TextureMask> masks;
  for (int i = 0; i < count; ++i) {
    const auto path = MaskPath(dir, use_stem, i);
    if (!std::filesystem::exists(path)) {
      throw Error("missing mask " + path.string());
    }
    TextureMask m = ReadMaskPgm(path);
    const auto probs = MaskProbsPath(dir, use_stem, i);
    if (std::filesystem::exists(probs)) ReadMaskProbs(m, probs);
    m.frame_index = i;
    masks.push_back(std::move(m));
  }
  return masks;
}

}  // namespace txc
