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

#include "pwcf/hamming.h"

#include <bit>
#include <fstream>
#include <string>

#include "pwcf/binary_io.h"
#include "pwcf/common.h"

namespace pwcf {
namespace {

constexpr std::string_view kCodesMagic = "PWB1";
constexpr std::uint32_t kCodesVersion = 1;
constexpr int kMaxBits = 65535;

int words_for(int bits) { return (bits + 63) / 64; }

std::uint64_t last_word_mask(int bits) {
  const int rem = bits % 64;
  return rem == 0 ? ~std::uint64_t{0} : (std::uint64_t{1} << rem) - 1;
}

}  // namespace

BinaryCodes::BinaryCodes(int bits, std::size_t count)
    : BinaryCodes(bits, count,
                  std::vector<std::uint64_t>(count * static_cast<std::size_t>(words_for(bits)))) {}

BinaryCodes::BinaryCodes(int bits, std::size_t count, std::vector<std::uint64_t> words)
    : bits_(bits), count_(count), words_per_code_(words_for(bits)), words_(std::move(words)) {
  if (bits < 1 || bits > kMaxBits) throw Error("code length must be in [1, 65535]");
  if (words_.size() != count_ * static_cast<std::size_t>(words_per_code_)) {
    throw Error("code word buffer has " + std::to_string(words_.size()) + " words, expected " +
                std::to_string(count_ * static_cast<std::size_t>(words_per_code_)));
  }
  const std::uint64_t mask = last_word_mask(bits_);
  for (std::size_t i = 0; i < count_; ++i) {
    if ((code(i).back() & ~mask) != 0) {
      throw Error("code " + std::to_string(i) + " has nonzero padding bits");
    }
  }
}

BinaryCodes BinaryCodes::select(std::span<const int> indices) const {
  BinaryCodes out(bits_, indices.size());
  for (std::size_t j = 0; j < indices.size(); ++j) {
    const int src = indices[j];
    if (src < 0 || static_cast<std::size_t>(src) >= count_) throw Error("code index out of range");
    const auto from = code(static_cast<std::size_t>(src));
    std::copy(from.begin(), from.end(), out.mutable_code(j).begin());
  }
  return out;
}

BinaryCodes pack(const Eigen::MatrixXd& codes) {
  BinaryCodes out(static_cast<int>(codes.rows()), static_cast<std::size_t>(codes.cols()));
  for (Eigen::Index i = 0; i < codes.cols(); ++i) {
    auto words = out.mutable_code(static_cast<std::size_t>(i));
    for (Eigen::Index j = 0; j < codes.rows(); ++j) {
      const double v = codes(j, i);
      if (v == 1.0) {
        words[static_cast<std::size_t>(j / 64)] |= std::uint64_t{1} << (j % 64);
      } else if (v != -1.0) {
        throw Error("pack: entry (" + std::to_string(j) + ", " + std::to_string(i) +
                    ") is not +-1");
      }
    }
  }
  return out;
}

Eigen::MatrixXd unpack(const BinaryCodes& codes) {
  Eigen::MatrixXd out(codes.bits(), static_cast<Eigen::Index>(codes.count()));
  for (std::size_t i = 0; i < codes.count(); ++i) {
    const auto words = codes.code(i);
    for (int j = 0; j < codes.bits(); ++j) {
      const bool set = (words[static_cast<std::size_t>(j / 64)] >> (j % 64)) & 1u;
      out(j, static_cast<Eigen::Index>(i)) = set ? 1.0 : -1.0;
    }
  }
  return out;
}

int hamming_distance(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b,
                     int bits) {
  if (a.size() != b.size() || static_cast<int>(a.size()) != words_for(bits)) {
    throw Error("hamming_distance: code length mismatch");
  }
  int dist = 0;
  const std::size_t last = a.size() - 1;
  for (std::size_t w = 0; w < last; ++w) dist += std::popcount(a[w] ^ b[w]);
  dist += std::popcount((a[last] ^ b[last]) & last_word_mask(bits));
  return dist;
}

int hamming_distance(const BinaryCodes& a, std::size_t i, const BinaryCodes& b, std::size_t j) {
  if (a.bits() != b.bits()) {
    throw Error("hamming_distance: code lengths " + std::to_string(a.bits()) + " and " +
                std::to_string(b.bits()) + " differ");
  }
  return hamming_distance(a.code(i), b.code(j), a.bits());
}

RankedResult retrieve(const BinaryCodes& queries, const BinaryCodes& database) {
  if (queries.bits() != database.bits()) {
    throw Error("retrieve: query code length " + std::to_string(queries.bits()) +
                " != database code length " + std::to_string(database.bits()));
  }
  const int r = database.bits();
  const std::size_t n = database.count();
  RankedResult result;
  result.queries.resize(queries.count());
  std::vector<std::uint16_t> dist(n);
  std::vector<std::size_t> bucket_start(static_cast<std::size_t>(r) + 2);
  for (std::size_t q = 0; q < queries.count(); ++q) {
    std::fill(bucket_start.begin(), bucket_start.end(), 0);
    const auto query = queries.code(q);
    for (std::size_t j = 0; j < n; ++j) {
      dist[j] = static_cast<std::uint16_t>(hamming_distance(query, database.code(j), r));
      ++bucket_start[dist[j] + 1u];
    }
    for (std::size_t b = 1; b < bucket_start.size(); ++b) bucket_start[b] += bucket_start[b - 1];
    // Counting sort: stable, so equal distances keep ascending index order.
    RankedList& out = result.queries[q];
    out.indices.resize(n);
    out.distances.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t slot = bucket_start[dist[j]]++;
      out.indices[slot] = static_cast<std::uint32_t>(j);
      out.distances[slot] = dist[j];
    }
  }
  return result;
}

void write_codes(const BinaryCodes& codes, std::ostream& os) {
  binary::write_magic(os, kCodesMagic);
  binary::write_u32(os, kCodesVersion);
  binary::write_u32(os, static_cast<std::uint32_t>(codes.bits()));
  binary::write_u64(os, codes.count());
  for (std::uint64_t w : codes.words()) binary::write_u64(os, w);
}

BinaryCodes read_codes(std::istream& is) {
  binary::Reader in(is, "PWB1");
  in.expect_magic(kCodesMagic);
  const std::uint32_t version = in.u32("version");
  if (version != kCodesVersion) throw Error("PWB1: unsupported version " + std::to_string(version));
  const std::uint32_t bits = in.u32("r");
  const std::uint64_t n = in.u64("n");
  if (bits == 0 || bits > static_cast<std::uint32_t>(kMaxBits)) {
    throw Error("PWB1: bad code length " + std::to_string(bits));
  }
  if (n > (std::uint64_t{1} << 32)) throw Error("PWB1: implausible code count");
  std::vector<std::uint64_t> words(static_cast<std::size_t>(n) *
                                   static_cast<std::size_t>(words_for(static_cast<int>(bits))));
  for (auto& w : words) w = in.u64("words");
  in.expect_end();
  return BinaryCodes(static_cast<int>(bits), static_cast<std::size_t>(n), std::move(words));
}

void save_codes(const BinaryCodes& codes, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  write_codes(codes, os);
  if (!os) throw Error("write failed: " + path.string());
}

BinaryCodes load_codes(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path.string() + " for reading");
  try {
    return read_codes(is);
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

}  // namespace pwcf
