#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cssdual/errors.hpp"

namespace cssdual::gf2 {

// Packed bit vector over GF(2). Bit i of word i/64 is component i;
// bits past size() are kept zero so whole-word ops need no masking.
class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(std::size_t length)
      : len_(length), words_((length + 63) / 64, 0) {}

  static BitVector from_indices(std::size_t length,
                                std::span<const std::uint32_t> indices);
  // "1011" -> bits 0,2,3 set; test/debug convenience
  static BitVector from_string(std::string_view bits);

  std::size_t size() const { return len_; }
  bool empty() const { return len_ == 0; }

  bool get(std::size_t i) const {
    return (words_[i >> 6] >> (i & 63)) & 1u;
  }
  void set(std::size_t i, bool v = true) {
    const std::uint64_t mask = std::uint64_t{1} << (i & 63);
    if (v)
      words_[i >> 6] |= mask;
    else
      words_[i >> 6] &= ~mask;
  }
  void flip(std::size_t i) { words_[i >> 6] ^= std::uint64_t{1} << (i & 63); }

  BitVector& operator^=(const BitVector& o);
  friend BitVector operator^(BitVector a, const BitVector& b) {
    a ^= b;
    return a;
  }

  std::size_t popcount() const;
  // parity of |a AND b|; even overlap <=> false
  bool overlap_parity(const BitVector& o) const;
  std::size_t overlap_count(const BitVector& o) const;
  bool any() const;
  // index of lowest set bit, or npos when zero
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::size_t first_set() const;

  bool operator==(const BitVector&) const = default;

  std::string to_string() const;
  std::vector<std::uint32_t> indices() const;
  const std::vector<std::uint64_t>& words() const { return words_; }

 private:
  std::size_t len_ = 0;
  std::vector<std::uint64_t> words_;
};

struct BitMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<BitVector> row;

  static BitMatrix from_rows(std::vector<BitVector> rows, std::size_t cols);
  BitMatrix transposed() const;
};

// GF(2) row rank via Gaussian elimination (pivot = lowest set bit).
std::size_t rank(const BitMatrix& m);

// Basis of the right null space {v : m v = 0}, from reduced row echelon
// form with free-column back-substitution. Output order: free columns
// ascending, so labels are reproducible across runs.
std::vector<BitVector> kernel_basis(const BitMatrix& m);

// True iff v is a GF(2) combination of basis vectors.
// Throws validation_error on length mismatch.
bool in_span(std::span<const BitVector> basis, const BitVector& v);

inline constexpr std::size_t kDefaultEnumCap = 30;

// Incremental echelon accumulator: insert() returns whether the vector
// grew the span. Backs rank/in_span and greedy basis selection.
class Echelon {
 public:
  explicit Echelon(std::size_t cols) : cols_(cols) {}
  // returns true if v was independent of what came before
  bool insert(BitVector v);
  bool contains(BitVector v) const;
  std::size_t rank() const { return rows_.size(); }
  std::size_t cols() const { return cols_; }

 private:
  std::size_t cols_;
  std::vector<BitVector> rows_;      // echelon rows
  std::vector<std::size_t> pivots_;  // pivot column of each row
};

namespace detail {
void check_enumeration(std::span<const BitVector> basis, std::size_t cap);
BitVector gray_element(std::span<const BitVector> basis, std::uint64_t t);
}  // namespace detail

// Visit all 2^M span elements in binary-reflected Gray order: consecutive
// elements differ by exactly one basis vector (a single XOR per step).
// Throws resource_error when M exceeds cap. Caller guarantees basis
// independence (duplicate elements are visited otherwise).
template <class Visitor>
void enumerate_span(std::span<const BitVector> basis, Visitor&& visit,
                    std::size_t cap = kDefaultEnumCap) {
  detail::check_enumeration(basis, cap);
  const std::size_t m = basis.size();
  BitVector x(basis.empty() ? 0 : basis[0].size());
  visit(static_cast<const BitVector&>(x));
  const std::uint64_t total = std::uint64_t{1} << m;
  for (std::uint64_t t = 1; t < total; ++t) {
    x ^= basis[static_cast<std::size_t>(std::countr_zero(t))];
    visit(static_cast<const BitVector&>(x));
  }
}

// Visit Gray-walk steps t in [t_begin, t_end); the chunk is seeded by
// computing gray(t_begin) directly, so disjoint ranges compose to the
// full walk. Used for deterministic chunk-parallel reductions.
template <class Visitor>
void enumerate_span_range(std::span<const BitVector> basis,
                          std::uint64_t t_begin, std::uint64_t t_end,
                          Visitor&& visit) {
  if (t_begin >= t_end) return;
  BitVector x = detail::gray_element(basis, t_begin);
  visit(static_cast<const BitVector&>(x));
  for (std::uint64_t t = t_begin + 1; t < t_end; ++t) {
    x ^= basis[static_cast<std::size_t>(std::countr_zero(t))];
    visit(static_cast<const BitVector&>(x));
  }
}

}  // namespace cssdual::gf2
