// Copyright 2026 The PWCF Authors.
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

#ifndef PWCF_BINARY_IO_H_
#define PWCF_BINARY_IO_H_

// Little-endian primitives shared by the PWF1 / PWM1 / PWB1 formats.

#include <array>
#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>

#include "pwcf/common.h"

namespace pwcf::binary {

inline void write_u32(std::ostream& os, std::uint32_t v) {
  std::array<char, 4> b;
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFFu);
  os.write(b.data(), b.size());
}

inline void write_u64(std::ostream& os, std::uint64_t v) {
  std::array<char, 8> b;
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFFu);
  os.write(b.data(), b.size());
}

inline void write_f64(std::ostream& os, double v) { write_u64(os, std::bit_cast<std::uint64_t>(v)); }

inline void write_magic(std::ostream& os, std::string_view magic) {
  os.write(magic.data(), static_cast<std::streamsize>(magic.size()));
}

class Reader {
 public:
  Reader(std::istream& is, std::string what) : is_(is), what_(std::move(what)) {}

  void expect_magic(std::string_view magic) {
    std::string got(magic.size(), '\0');
    is_.read(got.data(), static_cast<std::streamsize>(got.size()));
    if (!is_ || got != magic) {
      throw Error(what_ + ": bad magic, expected \"" + std::string(magic) + "\"");
    }
  }

  std::uint32_t u32(const char* field) {
    std::array<unsigned char, 4> b;
    read_bytes(b.data(), b.size(), field);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
    return v;
  }

  std::uint64_t u64(const char* field) {
    std::array<unsigned char, 8> b;
    read_bytes(b.data(), b.size(), field);
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
    return v;
  }

  double f64(const char* field) { return std::bit_cast<double>(u64(field)); }

  std::string bytes(std::size_t n, const char* field) {
    std::string s(n, '\0');
    read_bytes(s.data(), n, field);
    return s;
  }

  void expect_end() {
    if (is_.peek() != std::char_traits<char>::eof()) throw Error(what_ + ": trailing bytes");
  }

 private:
  void read_bytes(void* dst, std::size_t n, const char* field) {
    is_.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(is_.gcount()) != n) {
      throw Error(what_ + ": truncated while reading " + field);
    }
  }

  std::istream& is_;
  std::string what_;
};

}  // namespace pwcf::binary

#endif  // PWCF_BINARY_IO_H_
