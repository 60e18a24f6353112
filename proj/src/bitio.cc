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

#include "txc/bitio.h"

#include <bit>

#include "txc/error.h"

namespace txc {

void BitWriter::PutBit(int bit) {
  if (bit_count_ % 8 == 0) bytes_.push_back(0);
  if (bit) bytes_.back() |= static_cast<uint8_t>(0x80 >> (bit_count_ % 8));
  ++bit_count_;
}

void BitWriter::PutBits(uint32_t value, int count) {
  for (int i = count - 1; i >= 0; --i) PutBit((value >> i) & 1);
}

void BitWriter::PutUe(uint32_t value) {
  const uint64_t v = uint64_t{value} + 1;
  const int len = 64 - std::countl_zero(v);
  for (int i = 1; i < len; ++i) PutBit(0);
  for (int i = len - 1; i >= 0; --i) PutBit(static_cast<int>((v >> i) & 1));
}

void BitWriter::PutSe(int32_t value) {
  const uint32_t mapped =
      value > 0 ? 2u * static_cast<uint32_t>(value) - 1
                : 2u * static_cast<uint32_t>(-static_cast<int64_t>(value));
  PutUe(mapped);
}

void BitWriter::ByteAlign() {
  while (bit_count_ % 8 != 0) PutBit(0);
}

int BitWriter::UeLength(uint32_t value) {
  const uint64_t v = uint64_t{value} + 1;
  return 2 * (64 - std::countl_zero(v)) - 1;
}

int BitWriter::SeLength(int32_t value) {
  return UeLength(value > 0 ? 2u * static_cast<uint32_t>(value) - 1
                            : 2u * static_cast<uint32_t>(
                                       -static_cast<int64_t>(value)));
}

int BitReader::GetBit() {
  if (pos_ >= data_.size() * 8) throw Error("truncated stream");
  const int bit = (data_[pos_ / 8] >> (7 - pos_ % 8)) & 1;
  ++pos_;
  return bit;
}

uint32_t BitReader::GetBits(int count) {
  uint32_t v = 0;
  for (int i = 0; i < count; ++i) v = (v << 1) | GetBit();
  return v;
}

uint32_t BitReader::GetUe() {
  int zeros = 0;
  while (GetBit() == 0) {
    if (++zeros > 31) throw Error("malformed Exp-Golomb code");
  }
  const uint64_t v = (uint64_t{1} << zeros) | GetBits(zeros);
  if (v - 1 > UINT32_MAX) throw Error("malformed Exp-Golomb code");
  return static_cast<uint32_t>(v - 1);
}

int32_t BitReader::GetSe() {
  const uint32_t k = GetUe();
  if (k & 1) return static_cast<int32_t>((k + 1) / 2);
  return -static_cast<int32_t>(k / 2);
}

void BitReader::ByteAlign() { pos_ = (pos_ + 7) / 8 * 8; }

void PutU8(std::vector<uint8_t>& out, uint32_t v) {
  out.push_back(static_cast<uint8_t>(v));
}

void PutU16(std::vector<uint8_t>& out, uint32_t v) {
  PutU8(out, v & 0xff);
  PutU8(out, (v >> 8) & 0xff);
}

void PutU32(std::vector<uint8_t>& out, uint32_t v) {
  PutU16(out, v & 0xffff);
  PutU16(out, v >> 16);
}

void ByteReader::Need(size_t n) const {
  if (data_.size() - pos_ < n) throw Error("truncated stream");
}

uint32_t ByteReader::U8() {
  Need(1);
  return data_[pos_++];
}

uint32_t ByteReader::U16() {
  const uint32_t lo = U8();
  return lo | (U8() << 8);
}

uint32_t ByteReader::U32() {
  const uint32_t lo = U16();
  return lo | (U16() << 16);
}

void ByteReader::Skip(size_t n) {
  Need(n);
  pos_ += n;
}

}  // namespace txc
