// SPDX-License-Identifier: Apache-2.0
//
// csiloc -- CSI fingerprint localization toolkit
// Copyright (C) 2026 the csiloc authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "csiloc/common.hpp"

namespace csiloc {

// Little-endian binary encoding helpers. All csiloc file formats are byte
// streams (no struct dumps), so round-trips are bit-exact across platforms.

inline std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes,
                             std::uint64_t h = 0xCBF29CE484222325ULL) {
    for (std::uint8_t b : bytes) {
        h ^= b;
        h *= 0x100000001B3ULL;
    }
    return h;
}

class ByteWriter {
  public:
    void u8(std::uint8_t v) { buf_.push_back(v); }
    void u16(std::uint16_t v) { append_le(v); }
    void u32(std::uint32_t v) { append_le(v); }
    void u64(std::uint64_t v) { append_le(v); }
    void i32(std::int32_t v) { append_le(static_cast<std::uint32_t>(v)); }
    void i64(std::int64_t v) { append_le(static_cast<std::uint64_t>(v)); }
    void f64(double v) { append_le(std::bit_cast<std::uint64_t>(v)); }

    void bytes(std::span<const std::uint8_t> b) { buf_.insert(buf_.end(), b.begin(), b.end()); }
    void ascii(std::string_view s) {
        for (char c : s) buf_.push_back(static_cast<std::uint8_t>(c));
    }

    std::size_t size() const { return buf_.size(); }
    const std::vector<std::uint8_t>& data() const { return buf_; }
    std::uint64_t content_hash() const { return fnv1a64(buf_); }

    void write_file(const std::filesystem::path& path) const {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw error("cannot open for writing: " + path.string());
        out.write(reinterpret_cast<const char*>(buf_.data()),
                  static_cast<std::streamsize>(buf_.size()));
        if (!out) throw error("write failed: " + path.string());
    }

  private:
    template <typename T>
    void append_le(T v) {
        for (std::size_t i = 0; i < sizeof(T); ++i)
            buf_.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
    }

    std::vector<std::uint8_t> buf_;
};

class ByteReader {
  public:
    explicit ByteReader(std::vector<std::uint8_t> bytes) : buf_(std::move(bytes)) {}

    static ByteReader from_file(const std::filesystem::path& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw error("cannot open for reading: " + path.string());
        std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
        return ByteReader(std::move(bytes));
    }

    std::uint8_t u8() { return take<std::uint8_t>(); }
    std::uint16_t u16() { return take<std::uint16_t>(); }
    std::uint32_t u32() { return take<std::uint32_t>(); }
    std::uint64_t u64() { return take<std::uint64_t>(); }
    std::int32_t i32() { return static_cast<std::int32_t>(take<std::uint32_t>()); }
    std::int64_t i64() { return static_cast<std::int64_t>(take<std::uint64_t>()); }
    double f64() { return std::bit_cast<double>(take<std::uint64_t>()); }

    std::string ascii(std::size_t n) {
        need(n, "string");
        std::string s(reinterpret_cast<const char*>(buf_.data() + pos_), n);
        pos_ += n;
        return s;
    }

    std::size_t offset() const { return pos_; }
    std::size_t size() const { return buf_.size(); }
    std::size_t remaining() const { return buf_.size() - pos_; }

    void expect_exhausted(const std::string& what) const {
        if (pos_ != buf_.size())
            throw format_error(what + ": trailing bytes, expected length " +
                                   std::to_string(pos_) + " but file has " +
                                   std::to_string(buf_.size()),
                               pos_);
    }

    // Throws a format error naming expected vs actual length if fewer than
    // `n` bytes remain.
    void need(std::size_t n, const std::string& what) const {
        if (buf_.size() - pos_ < n)
            throw format_error("truncated " + what + ": expected " + std::to_string(pos_ + n) +
                                   " bytes, file has " + std::to_string(buf_.size()),
                               pos_);
    }

  private:
    template <typename T>
    T take() {
        need(sizeof(T), "field");
        std::uint64_t v = 0;
        for (std::size_t i = 0; i < sizeof(T); ++i)
            v |= static_cast<std::uint64_t>(buf_[pos_ + i]) << (8 * i);
        pos_ += sizeof(T);
        if constexpr (sizeof(T) == 8)
            return static_cast<T>(v);
        else
            return static_cast<T>(v & ((1ULL << (8 * sizeof(T))) - 1));
    }

    std::vector<std::uint8_t> buf_;
    std::size_t pos_ = 0;
};

}  // namespace csiloc
