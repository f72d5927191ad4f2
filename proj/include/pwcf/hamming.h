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

#ifndef PWCF_HAMMING_H_
#define PWCF_HAMMING_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace pwcf {

// Bit-packed +-1 codes. Code i occupies words_per_code() consecutive 64-bit
// words; bit j (word j / 64, bit j % 64) is set iff entry j is +1. Bits past
// the code length are always zero.
class BinaryCodes {
 public:
  BinaryCodes() = default;
  BinaryCodes(int bits, std::size_t count);
  BinaryCodes(int bits, std::size_t count, std::vector<std::uint64_t> words);

  int bits() const { return bits_; }
  std::size_t count() const { return count_; }
  int words_per_code() const { return words_per_code_; }
  const std::vector<std::uint64_t>& words() const { return words_; }

  std::span<const std::uint64_t> code(std::size_t i) const {
    return {words_.data() + i * static_cast<std::size_t>(words_per_code_),
            static_cast<std::size_t>(words_per_code_)};
  }
  std::span<std::uint64_t> mutable_code(std::size_t i) {
    return {words_.data() + i * static_cast<std::size_t>(words_per_code_),
            static_cast<std::size_t>(words_per_code_)};
  }

  BinaryCodes select(std::span<const int> indices) const;
  bool operator==(const BinaryCodes&) const = default;

 private:
  int bits_ = 0;
  std::size_t count_ = 0;
  int words_per_code_ = 0;
  std::vector<std::uint64_t> words_;
};

// Packs an r x n matrix of +-1 entries; any other value is an error.
BinaryCodes pack(const Eigen::MatrixXd& codes);
Eigen::MatrixXd unpack(const BinaryCodes& codes);

// popcount(a XOR b). Both spans must have the same length; `bits` masks the
// last word.
int hamming_distance(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b,
                     int bits);
int hamming_distance(const BinaryCodes& a, std::size_t i, const BinaryCodes& b, std::size_t j);

struct RankedList {
  std::vector<std::uint32_t> indices;  // database indices, nearest first
  std::vector<std::uint16_t> distances;
};

struct RankedResult {
  std::vector<RankedList> queries;
};

// Exhaustive ranking of the whole database for every query, ascending
// Hamming distance with ties broken by ascending database index.
RankedResult retrieve(const BinaryCodes& queries, const BinaryCodes& database);

// "PWB1": magic, u32 version = 1, u32 r, u64 n, then n * ceil(r/64)
// little-endian u64 words.
void write_codes(const BinaryCodes& codes, std::ostream& os);
BinaryCodes read_codes(std::istream& is);
void save_codes(const BinaryCodes& codes, const std::filesystem::path& path);
BinaryCodes load_codes(const std::filesystem::path& path);

}  // namespace pwcf

#endif  // PWCF_HAMMING_H_
