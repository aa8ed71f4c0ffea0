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

#include "rtlleak/bitvec.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <stdexcept>

namespace rtlleak {

namespace {
size_t words_for(uint32_t width) { return (width + 63) / 64; }

int hex_digit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}
}  // namespace

BitVec::BitVec(uint32_t width, uint64_t value) : width_(width) {
  if (width == 0) throw std::invalid_argument("BitVec width must be >= 1");
  words_.assign(words_for(width), 0);
  words_[0] = value;
  mask_top();
}

void BitVec::mask_top() {
  uint32_t rem = width_ % 64;
  if (rem != 0) words_.back() &= (uint64_t{1} << rem) - 1;
}

BitVec BitVec::from_hex(uint32_t width, std::string_view hex) {
  BitVec r(width);
  uint32_t pos = 0;
  for (auto it = hex.rbegin(); it != hex.rend(); ++it) {
    if (*it == '_') continue;
    int d = hex_digit(*it);
    if (d < 0) throw std::invalid_argument("bad hex digit");
    for (int b = 0; b < 4; ++b, ++pos) {
      if ((d >> b) & 1) {
        if (pos >= width) throw std::overflow_error("literal exceeds width");
        r.set_bit(pos, true);
      }
    }
  }
  return r;
}

BitVec BitVec::from_bin(uint32_t width, std::string_view bin) {
  BitVec r(width);
  uint32_t pos = 0;
  for (auto it = bin.rbegin(); it != bin.rend(); ++it) {
    if (*it == '_') continue;
    if (*it != '0' && *it != '1') throw std::invalid_argument("bad bin digit");
    if (*it == '1') {
      if (pos >= width) throw std::overflow_error("literal exceeds width");
      r.set_bit(pos, true);
    }
    ++pos;
  }
  return r;
}

BitVec BitVec::from_dec(uint32_t width, std::string_view dec) {
  // Accumulate at a generous width, then check the fit.
  uint32_t wide = std::max<uint32_t>(width, static_cast<uint32_t>(dec.size()) * 4 + 4);
  BitVec acc(wide), ten(wide, 10);
  for (char c : dec) {
    if (c == '_') continue;
    if (c < '0' || c > '9') throw std::invalid_argument("bad dec digit");
    acc = acc * ten + BitVec(wide, static_cast<uint64_t>(c - '0'));
  }
  if (acc.active_bits() > width) throw std::overflow_error("literal exceeds width");
  return acc.resized(width);
}

bool BitVec::bit(uint32_t i) const {
  if (i >= width_) return false;
  return (words_[i / 64] >> (i % 64)) & 1;
}

void BitVec::set_bit(uint32_t i, bool v) {
  assert(i < width_);
  uint64_t m = uint64_t{1} << (i % 64);
  if (v)
    words_[i / 64] |= m;
  else
    words_[i / 64] &= ~m;
}

bool BitVec::is_zero() const {
  return std::all_of(words_.begin(), words_.end(), [](uint64_t w) { return w == 0; });
}

bool BitVec::fits_u64() const {
  for (size_t i = 1; i < words_.size(); ++i)
    if (words_[i]) return false;
  return true;
}

uint32_t BitVec::active_bits() const {
  for (size_t i = words_.size(); i-- > 0;) {
    if (words_[i]) return static_cast<uint32_t>(i * 64 + 64 - std::countl_zero(words_[i]));
  }
  return 0;
}

BitVec BitVec::resized(uint32_t width) const {
  BitVec r(width);
  size_t n = std::min(r.words_.size(), words_.size());
  std::copy_n(words_.begin(), n, r.words_.begin());
  r.mask_top();
  return r;
}

BitVec BitVec::slice(uint32_t lo, uint32_t width) const {
  return shr(lo).resized(width);
}

void BitVec::insert(uint32_t lo, const BitVec& v) {
  if (lo == 0 && v.width_ >= width_) {
    *this = v.resized(width_);
    return;
  }
  for (uint32_t i = 0; i < v.width_ && lo + i < width_; ++i) set_bit(lo + i, v.bit(i));
}

std::string BitVec::to_hex() const {
  static const char* digits = "0123456789abcdef";
  uint32_t n = (width_ + 3) / 4;
  std::string s(n, '0');
  for (uint32_t d = 0; d < n; ++d) {
    uint32_t pos = d * 4;
    uint64_t nib = (words_[pos / 64] >> (pos % 64)) & 0xF;
    s[n - 1 - d] = digits[nib];
  }
  return s;
}

std::string BitVec::to_bin() const {
  std::string s(width_, '0');
  for (uint32_t i = 0; i < width_; ++i)
    if (bit(i)) s[width_ - 1 - i] = '1';
  return s;
}

std::string BitVec::to_dec() const {
  if (fits_u64()) return std::to_string(words_[0]);
  std::string out;
  BitVec v = *this, ten(width_, 10), q(width_), r(width_);
  while (!v.is_zero()) {
    divmod(v, ten, q, r);
    out.push_back(static_cast<char>('0' + r.to_u64()));
    v = q;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

BitVec operator~(const BitVec& a) {
  BitVec r = a;
  for (auto& w : r.words_) w = ~w;
  r.mask_top();
  return r;
}

#define RTLLEAK_BITWISE(op)                                     \
  BitVec operator op(const BitVec& a, const BitVec& b) {        \
    assert(a.width_ == b.width_);                               \
    BitVec r = a;                                               \
    for (size_t i = 0; i < r.words_.size(); ++i) r.words_[i] op## = b.words_[i]; \
    return r;                                                   \
  }
RTLLEAK_BITWISE(&)
RTLLEAK_BITWISE(|)
RTLLEAK_BITWISE(^)
#undef RTLLEAK_BITWISE

BitVec operator+(const BitVec& a, const BitVec& b) {
  assert(a.width_ == b.width_);
  BitVec r = a;
  if (r.words_.size() == 1) {
    r.words_[0] += b.words_[0];
    r.mask_top();
    return r;
  }
  unsigned __int128 carry = 0;
  for (size_t i = 0; i < r.words_.size(); ++i) {
    unsigned __int128 s = static_cast<unsigned __int128>(a.words_[i]) + b.words_[i] + carry;
    r.words_[i] = static_cast<uint64_t>(s);
    carry = s >> 64;
  }
  r.mask_top();
  return r;
}

BitVec BitVec::negate() const {
  return ~*this + BitVec(width_, 1);
}

BitVec operator-(const BitVec& a, const BitVec& b) {
  assert(a.width_ == b.width_);
  if (a.words_.size() == 1) {
    BitVec r = a;
    r.words_[0] -= b.words_[0];
    r.mask_top();
    return r;
  }
  return a + b.negate();
}

BitVec operator*(const BitVec& a, const BitVec& b) {
  assert(a.width_ == b.width_);
  BitVec r(a.width_);
  if (r.words_.size() == 1) {
    r.words_[0] = a.words_[0] * b.words_[0];
    r.mask_top();
    return r;
  }
  size_t n = r.words_.size();
  for (size_t i = 0; i < n; ++i) {
    unsigned __int128 carry = 0;
    for (size_t j = 0; i + j < n; ++j) {
      unsigned __int128 cur = static_cast<unsigned __int128>(a.words_[i]) * b.words_[j] +
                              r.words_[i + j] + carry;
      r.words_[i + j] = static_cast<uint64_t>(cur);
      carry = cur >> 64;
    }
  }
  r.mask_top();
  return r;
}

void BitVec::divmod(const BitVec& a, const BitVec& b, BitVec& quot, BitVec& rem) {
  assert(a.width_ == b.width_);
  quot = BitVec(a.width_);
  rem = BitVec(a.width_);
  if (b.is_zero()) return;
  if (a.words_.size() == 1) {
    quot.words_[0] = a.words_[0] / b.words_[0];
    rem.words_[0] = a.words_[0] % b.words_[0];
    return;
  }
  for (uint32_t i = a.width_; i-- > 0;) {
    rem = rem.shl(1);
    rem.set_bit(0, a.bit(i));
    if (compare(rem, b) >= 0) {
      rem = rem - b;
      quot.set_bit(i, true);
    }
  }
}

BitVec BitVec::shl(uint64_t amount) const {
  BitVec r(width_);
  if (amount >= width_) return r;
  size_t ws = amount / 64, bs = amount % 64;
  for (size_t i = words_.size(); i-- > ws;) {
    uint64_t v = words_[i - ws] << bs;
    if (bs && i - ws > 0) v |= words_[i - ws - 1] >> (64 - bs);
    r.words_[i] = v;
  }
  r.mask_top();
  return r;
}

BitVec BitVec::shr(uint64_t amount) const {
  BitVec r(width_);
  if (amount >= width_) return r;
  size_t ws = amount / 64, bs = amount % 64;
  for (size_t i = 0; i + ws < words_.size(); ++i) {
    uint64_t v = words_[i + ws] >> bs;
    if (bs && i + ws + 1 < words_.size()) v |= words_[i + ws + 1] << (64 - bs);
    r.words_[i] = v;
  }
  return r;
}

int BitVec::compare(const BitVec& a, const BitVec& b) {
  size_t n = std::max(a.words_.size(), b.words_.size());
  for (size_t i = n; i-- > 0;) {
    uint64_t x = a.word(i), y = b.word(i);
    if (x != y) return x < y ? -1 : 1;
  }
  return 0;
}

bool BitVec::reduce_and() const { return (~*this).is_zero(); }

bool BitVec::reduce_xor() const {
  int p = 0;
  for (auto w : words_) p ^= std::popcount(w) & 1;
  return p;
}

}  // namespace rtlleak
