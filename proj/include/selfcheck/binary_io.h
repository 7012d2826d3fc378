// Copyright 2026 The selfcheck Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Little-endian byte buffer helpers shared by the on-disk containers.

#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <vector>

#include "selfcheck/error.h"

namespace selfcheck {

using Bytes = std::vector<std::uint8_t>;

class ByteWriter {
 public:
  void Raw(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    buf_.insert(buf_.end(), b, b + n);
  }
  void U8(std::uint8_t v) { buf_.push_back(v); }
  void U16(std::uint16_t v) { Le(v); }
  void U32(std::uint32_t v) { Le(v); }
  void U64(std::uint64_t v) { Le(v); }
  void F32(float v) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    Le(bits);
  }
  void F32s(std::span<const float> v) {
    for (float x : v) F32(x);
  }
  void Str(const std::string& s) {
    U32(static_cast<std::uint32_t>(s.size()));
    Raw(s.data(), s.size());
  }

  Bytes& bytes() { return buf_; }
  Bytes Take() { return std::move(buf_); }

 private:
  template <typename T>
  void Le(T v) {
    for (std::size_t i = 0; i < sizeof(T); ++i)
      buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  Bytes buf_;
};

class ByteReader {
 public:
  ByteReader(std::span<const std::uint8_t> data, std::string what)
      : data_(data), what_(std::move(what)) {}

  void Need(std::size_t n) const {
    if (data_.size() - pos_ < n)
      throw FormatError(what_ + ": truncated at byte " + std::to_string(pos_));
  }
  std::uint8_t U8() {
    Need(1);
    return data_[pos_++];
  }
  std::uint16_t U16() { return Le<std::uint16_t>(); }
  std::uint32_t U32() { return Le<std::uint32_t>(); }
  std::uint64_t U64() { return Le<std::uint64_t>(); }
  float F32() {
    std::uint32_t bits = Le<std::uint32_t>();
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
  }
  std::vector<float> F32s(std::size_t n) {
    if (n > (data_.size() - pos_) / 4)
      throw FormatError(what_ + ": truncated float block at byte " + std::to_string(pos_));
    std::vector<float> out(n);
    for (auto& v : out) v = F32();
    return out;
  }
  std::string Str() {
    std::uint32_t n = U32();
    Need(n);
    std::string s(reinterpret_cast<const char*>(data_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  void Magic(const char (&magic)[5]) {
    Need(4);
    if (std::memcmp(data_.data() + pos_, magic, 4) != 0)
      throw FormatError(what_ + ": bad magic, expected \"" + std::string(magic) + "\"");
    pos_ += 4;
  }
  std::span<const std::uint8_t> Take(std::size_t n) {
    Need(n);
    auto s = data_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  bool AtEnd() const { return pos_ == data_.size(); }
  void ExpectEnd() const {
    if (!AtEnd())
      throw FormatError(what_ + ": " + std::to_string(data_.size() - pos_) +
                        " trailing bytes");
  }
  std::size_t pos() const { return pos_; }

 private:
  template <typename T>
  T Le() {
    Need(sizeof(T));
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i)
      v |= static_cast<T>(static_cast<T>(data_[pos_ + i]) << (8 * i));
    pos_ += sizeof(T);
    return v;
  }

  std::span<const std::uint8_t> data_;
  std::string what_;
  std::size_t pos_ = 0;
};

Bytes ReadFileBytes(const std::string& path);
void WriteFileBytes(const std::string& path, std::span<const std::uint8_t> bytes);

// FNV-1a, 64-bit.
std::uint64_t Fnv1a64(std::span<const std::uint8_t> bytes);

}  // namespace selfcheck
