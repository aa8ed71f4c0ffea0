// Copyright 2026 The rtlleak Authors.
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

// Fixed-width two-valued bit vector used for literals and simulation.

#ifndef RTLLEAK_BITVEC_HPP
#define RTLLEAK_BITVEC_HPP

#include <boost/container/small_vector.hpp>

#include <cstdint>
#include <string>
#include <string_view>

namespace rtlleak {

// Unsigned bit vector of arbitrary width. All arithmetic is modulo 2^width.
// Bits above `width` in the top word are always zero.
class BitVec {
 public:
  BitVec() : BitVec(1, 0) {}
  explicit BitVec(uint32_t width, uint64_t value = 0);

  static BitVec from_hex(uint32_t width, std::string_view hex);
  static BitVec from_bin(uint32_t width, std::string_view bin);
  static BitVec from_dec(uint32_t width, std::string_view dec);

  uint32_t width() const { return width_; }
  bool bit(uint32_t i) const;
  void set_bit(uint32_t i, bool v);
  uint64_t word(size_t i) const { return i < words_.size() ? words_[i] : 0; }
  size_t num_words() const { return words_.size(); }
  uint64_t to_u64() const { return words_[0]; }
  bool is_zero() const;
  bool fits_u64() const;
  // Minimum number of bits needed to represent the value (0 -> 0).
  uint32_t active_bits() const;

  // Zero-extends or truncates.
  BitVec resized(uint32_t width) const;
  BitVec slice(uint32_t lo, uint32_t width) const;
  // Writes `v` into bits [lo, lo + v.width()) clipped to this vector.
  void insert(uint32_t lo, const BitVec& v);

  std::string to_hex() const;  // no prefix, lowercase, ceil(width/4) digits
  std::string to_bin() const;  // exactly `width` digits
  std::string to_dec() const;

  // Operands must have equal widths unless noted.
  friend BitVec operator~(const BitVec& a);
  friend BitVec operator&(const BitVec& a, const BitVec& b);
  friend BitVec operator|(const BitVec& a, const BitVec& b);
  friend BitVec operator^(const BitVec& a, const BitVec& b);
  friend BitVec operator+(const BitVec& a, const BitVec& b);
  friend BitVec operator-(const BitVec& a, const BitVec& b);
  friend BitVec operator*(const BitVec& a, const BitVec& b);
  // Division by zero yields all-zero (two-valued stand-in for X).
  static void divmod(const BitVec& a, const BitVec& b, BitVec& quot,
                     BitVec& rem);
  BitVec shl(uint64_t amount) const;
  BitVec shr(uint64_t amount) const;
  BitVec negate() const;

  // Width-agnostic unsigned comparison.
  static int compare(const BitVec& a, const BitVec& b);

  bool reduce_and() const;
  bool reduce_or() const { return !is_zero(); }
  bool reduce_xor() const;

  friend bool operator==(const BitVec& a, const BitVec& b) {
    return a.width_ == b.width_ && a.words_ == b.words_;
  }

 private:
  void mask_top();

  uint32_t width_;
  boost::container::small_vector<uint64_t, 2> words_;
};

}  // namespace rtlleak

#endif  // RTLLEAK_BITVEC_HPP
