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

#ifndef TXC_BITIO_H_
#define TXC_BITIO_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace txc {

// MSB-first bit writer. Exp-Golomb codes follow the H.264 ue(v)/se(v) layout.
class BitWriter {
 public:
  void PutBit(int bit);
  void PutBits(uint32_t value, int count);
  void PutUe(uint32_t value);
  void PutSe(int32_t value);
  // Pads with zero bits to the next byte boundary.
  void ByteAlign();

  size_t bit_count() const { return bit_count_; }
  const std::vector<uint8_t>& bytes() const { return bytes_; }

  static int UeLength(uint32_t value);
  static int SeLength(int32_t value);

 private:
  std::vector<uint8_t> bytes_;
  size_t bit_count_ = 0;
};

// Reads what BitWriter wrote; throws txc::Error past the end of the buffer.
class BitReader {
 public:
  explicit BitReader(std::span<const uint8_t> data) : data_(data) {}

  int GetBit();
  uint32_t GetBits(int count);
  uint32_t GetUe();
  int32_t GetSe();
  void ByteAlign();

  size_t bit_position() const { return pos_; }
  size_t byte_position() const { return (pos_ + 7) / 8; }

 private:
  std::span<const uint8_t> data_;
  size_t pos_ = 0;
};

// Little-endian byte helpers for the container.
void PutU8(std::vector<uint8_t>& out, uint32_t v);
void PutU16(std::vector<uint8_t>& out, uint32_t v);
void PutU32(std::vector<uint8_t>& out, uint32_t v);

class ByteReader {
 public:
  explicit ByteReader(std::span<const uint8_t> data) : data_(data) {}
  uint32_t U8();
  uint32_t U16();
  uint32_t U32();
  std::span<const uint8_t> Rest() const { return data_.subspan(pos_); }
  void Skip(size_t n);
  size_t position() const { return pos_; }
  size_t remaining() const { return data_.size() - pos_; }

 private:
  void Need(size_t n) const;
  std::span<const uint8_t> data_;
  size_t pos_ = 0;
};

}  // namespace txc

#endif  // TXC_BITIO_H_
