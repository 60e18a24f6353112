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

#include "txc/y4m.h"

#include <fstream>
#include <sstream>
#include <string>

#include "txc/error.h"

namespace txc {
namespace {

constexpr char kMagic[] = "YUV4MPEG2";

bool IsSupportedColourspace(const std::string& tag) {
  return tag == "420" || tag == "420jpeg" || tag == "420paldv" ||
         tag == "420mpeg2";
}

void ReadPlane(std::istream& in, Plane& plane) {
  in.read(reinterpret_cast<char*>(plane.samples.data()),
          static_cast<std::streamsize>(plane.samples.size()));
  if (static_cast<size_t>(in.gcount()) != plane.samples.size()) {
    throw Error("truncated frame payload");
  }
}

Frame ReadFramePayload(std::istream& in, int width, int height, int index) {
  Frame f = Frame::Blank(width, height);
  f.frame_index = index;
  ReadPlane(in, f.y);
  ReadPlane(in, f.u);
  ReadPlane(in, f.v);
  return f;
}

void WriteCropped(const Plane& p, int w, int h, std::ostream& out) {
  for (int y = 0; y < h; ++y) {
    out.write(reinterpret_cast<const char*>(p.Row(y).data()), w);
  }
}

}  // namespace

Sequence ReadY4m(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw Error("empty stream");
  std::istringstream tokens(header);
  std::string magic;
  tokens >> magic;
  if (magic != kMagic) throw Error("malformed header: missing YUV4MPEG2 magic");

  Sequence seq;
  int width = 0;
  int height = 0;
  std::string tok;
  while (tokens >> tok) {
    const char key = tok[0];
    const std::string value = tok.substr(1);
    try {
      switch (key) {
        case 'W': width = std::stoi(value); break;
        case 'H': height = std::stoi(value); break;
        case 'F': {
          const auto colon = value.find(':');
          if (colon == std::string::npos) throw Error("malformed F tag");
          seq.fps_num = std::stoi(value.substr(0, colon));
          seq.fps_den = std::stoi(value.substr(colon + 1));
          break;
        }
        case 'C':
          if (!IsSupportedColourspace(value)) {
            throw Error("unsupported colourspace C" + value);
          }
          break;
        default: break;  // I, A, X tags carry nothing we need.
      }
    } catch (const std::logic_error&) {
      throw Error("malformed header tag '" + tok + "'");
    }
  }
  if (width <= 0 || height <= 0) throw Error("malformed header: bad size");

  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("FRAME", 0) != 0) throw Error("malformed frame marker");
    seq.frames.push_back(ReadFramePayload(
        in, width, height, static_cast<int>(seq.frames.size())));
  }
  return seq;
}

size_t WriteY4m(const Sequence& seq, std::ostream& out) {
  if (seq.empty()) throw Error("cannot write an empty sequence");
  const Frame& first = seq.frames.front();
  const int w = first.display_width;
  const int h = first.display_height;
  const std::string header = std::string(kMagic) + " W" + std::to_string(w) +
                             " H" + std::to_string(h) + " F" +
                             std::to_string(seq.fps_num) + ":" +
                             std::to_string(seq.fps_den) + " Ip C420\n";
  const auto start = out.tellp();
  out << header;
  for (const Frame& f : seq.frames) {
    if (f.display_width != w || f.display_height != h) {
      throw Error("frames differ in dimensions");
    }
    out << "FRAME\n";
    WriteCropped(f.y, w, h, out);
    WriteCropped(f.u, ChromaSize(w), ChromaSize(h), out);
    WriteCropped(f.v, ChromaSize(w), ChromaSize(h), out);
  }
  if (!out) throw Error("write failure");
  const size_t frame_bytes =
      static_cast<size_t>(w) * h + 2 * static_cast<size_t>(ChromaSize(w)) *
                                       ChromaSize(h);
  const size_t total = header.size() + seq.size() * (6 + frame_bytes);
  if (start >= 0 && out.tellp() >= 0 &&
      static_cast<size_t>(out.tellp() - start) != total) {
    throw Error("write failure");
  }
  return total;
}

Sequence ReadRawYuv(std::istream& in, int width, int height, int max_frames) {
  if (width <= 0 || height <= 0) throw Error("raw yuv needs a positive size");
  Sequence seq;
  while (max_frames == 0 || static_cast<int>(seq.size()) < max_frames) {
    if (in.peek() == std::char_traits<char>::eof()) break;
    seq.frames.push_back(ReadFramePayload(in, width, height,
                                          static_cast<int>(seq.size())));
  }
  if (max_frames > 0 && static_cast<int>(seq.size()) < max_frames) {
    throw Error("raw yuv stream shorter than requested frame count");
  }
  return seq;
}

Sequence ReadY4mFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return ReadY4m(in);
}

size_t WriteY4mFile(const Sequence& seq, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  return WriteY4m(seq, out);
}

}  // namespace txc
