#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ras {

// Fixed-length binary word, packed 64 bits per limb. Bits past size() in the
// last limb are kept zero so limb-wise XOR and popcount stay exact.
class BitVector {
public:
  BitVector() = default;
  explicit BitVector(std::size_t n) : n_(n), w_((n + 63) / 64, 0) {}

  // Parses a string of '0'/'1' characters.
  static BitVector from_string(const std::string& s) {
    BitVector v(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '1')
        v.set(i, true);
      else if (s[i] != '0')
        throw std::invalid_argument("BitVector: expected '0' or '1', got '" +
                                    std::string(1, s[i]) + "'");
    }
    return v;
  }

  std::size_t size() const { return n_; }
  bool empty() const { return n_ == 0; }

  bool get(std::size_t i) const {
    check_index(i);
    return (w_[i >> 6] >> (i & 63)) & 1u;
  }
  void set(std::size_t i, bool b) {
    check_index(i);
    uint64_t mask = uint64_t(1) << (i & 63);
    if (b)
      w_[i >> 6] |= mask;
    else
      w_[i >> 6] &= ~mask;
  }
  void flip(std::size_t i) {
    check_index(i);
    w_[i >> 6] ^= uint64_t(1) << (i & 63);
  }

  BitVector& operator^=(const BitVector& o) {
    if (n_ != o.n_)
      throw std::length_error("BitVector: xor length mismatch (" +
                              std::to_string(n_) + " vs " + std::to_string(o.n_) + ")");
    for (std::size_t i = 0; i < w_.size(); ++i) w_[i] ^= o.w_[i];
    return *this;
  }
  friend BitVector operator^(BitVector a, const BitVector& b) {
    a ^= b;
    return a;
  }
  bool operator==(const BitVector& o) const = default;

  std::size_t count() const {
    std::size_t c = 0;
    for (uint64_t w : w_) c += std::popcount(w);
    return c;
  }
  bool any() const {
    for (uint64_t w : w_)
      if (w) return true;
    return false;
  }

  std::string to_string() const {
    std::string s(n_, '0');
    for (std::size_t i = 0; i < n_; ++i)
      if (get(i)) s[i] = '1';
    return s;
  }

  const std::vector<uint64_t>& words() const { return w_; }

private:
  void check_index(std::size_t i) const {
    if (i >= n_)
      throw std::out_of_range("BitVector: index " + std::to_string(i) +
                              " out of range for size " + std::to_string(n_));
  }

  std::size_t n_ = 0;
  std::vector<uint64_t> w_;
};

inline std::size_t hamming_weight(const BitVector& v) { return v.count(); }

// Per-sub-block Hamming weights of a message split into length-k pieces.
struct WeightProfile {
  int k = 0;
  std::vector<int> weights;

  // Number of non-zero entries (the T of the support envelope).
  int support() const {
    int t = 0;
    for (int w : weights)
      if (w > 0) ++t;
    return t;
  }
};

inline WeightProfile weight_profile(const BitVector& u, int k) {
  if (k < 1) throw std::invalid_argument("weight_profile: k must be >= 1");
  if (u.size() % std::size_t(k) != 0)
    throw std::length_error("weight_profile: length " + std::to_string(u.size()) +
                            " not divisible by k=" + std::to_string(k));
  WeightProfile p;
  p.k = k;
  p.weights.resize(u.size() / k, 0);
  for (std::size_t i = 0; i < u.size(); ++i)
    if (u.get(i)) ++p.weights[i / k];
  return p;
}

}  // namespace ras
