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

#ifndef TXC_Y4M_H_
#define TXC_Y4M_H_

#include <cstddef>
#include <filesystem>
#include <istream>
#include <ostream>

#include "txc/frame.h"

namespace txc {

// Reads a YUV4MPEG2 stream. Only 4:2:0 colourspaces are accepted (C420,
// C420jpeg, C420paldv, C420mpeg2, or no C tag). Frames are returned unpadded.
Sequence ReadY4m(std::istream& in);

// Writes frames cropped to their display dimensions. Returns bytes written.
size_t WriteY4m(const Sequence& seq, std::ostream& out);

// Headerless planar I420. `max_frames` of 0 reads until end of stream.
Sequence ReadRawYuv(std::istream& in, int width, int height,
                    int max_frames = 0);

Sequence ReadY4mFile(const std::filesystem::path& path);
size_t WriteY4mFile(const Sequence& seq, const std::filesystem::path& path);

}  // namespace txc

#endif  // TXC_Y4M_H_
