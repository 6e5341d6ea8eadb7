#include "cssdual/gf2.hpp"

#include <algorithm>
#include <bit>

namespace cssdual::gf2 {

BitVector BitVector::from_indices(std::size_t length,
                                  std::span<const std::uint32_t> indices) {
  BitVector v(length);
  for (std::uint32_t i : indices) {
    if (i >= length)
      throw validation_error("bit index " + std::to_string(i) +
                             " out of range for length " +
                             std::to_string(length));
    v.set(i);
  }
  return v;
}

BitVector BitVector::from_string(std::string_view bits) {
  BitVector v(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] == '1')
      v.set(i);
    else if (bits[i] != '0')
      throw validation_error("bit string must contain only 0/1");
  }
  return v;
}

BitVector& BitVector::operator^=(const BitVector& o) {
  if (len_ != o.len_)
    throw validation_error("BitVector length mismatch: " +
                           std::to_string(len_) + " vs " +
                           std::to_string(o.len_));
  for (std::size_t w = 0; w < words_.size(); ++w) words_[w] ^= o.words_[w];
  return *this;
}

std::size_t BitVector::popcount() const {
  std::size_t n = 0;
  for (std::uint64_t w : words_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

bool BitVector::overlap_parity(const BitVector& o) const {
  if (len_ != o.len_)
    throw validation_error("BitVector length mismatch in overlap");
  std::uint64_t acc = 0;
  for (std::size_t w = 0; w < words_.size(); ++w)
    acc ^= words_[w] & o.words_[w];
  return std::popcount(acc) & 1;
}

std::size_t BitVector::overlap_count(const BitVector& o) const {
  if (len_ != o.len_)
    throw validation_error("BitVector length mismatch in overlap");
  std::size_t n = 0;
  for (std::size_t w = 0; w < words_.size(); ++w)
    n += static_cast<std::size_t>(std::popcount(words_[w] & o.words_[w]));
  return n;
}

bool BitVector::any() const {
  for (std::uint64_t w : words_)
    if (w) return true;
  return false;
}

std::size_t BitVector::first_set() const {
  for (std::size_t w = 0; w < words_.size(); ++w)
    if (words_[w])
      return w * 64 + static_cast<std::size_t>(std::countr_zero(words_[w]));
  return npos;
}

std::string BitVector::to_string() const {
  std::string s(len_, '0');
  for (std::size_t i = 0; i < len_; ++i)
    if (get(i)) s[i] = '1';
  return s;
}

std::vector<std::uint32_t> BitVector::indices() const {
  std::vector<std::uint32_t> out;
  for (std::size_t i = 0; i < len_; ++i)
    if (get(i)) out.push_back(static_cast<std::uint32_t>(i));
  return out;
}

BitMatrix BitMatrix::from_rows(std::vector<BitVector> rows, std::size_t cols) {
  for (const BitVector& r : rows)
    if (r.size() != cols)
      throw validation_error("BitMatrix row length does not match cols");
  BitMatrix m;
  m.rows = rows.size();
  m.cols = cols;
  m.row = std::move(rows);
  return m;
}

BitMatrix BitMatrix::transposed() const {
  BitMatrix t;
  t.rows = cols;
  t.cols = rows;
  t.row.assign(cols, BitVector(rows));
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j)
      if (row[i].get(j)) t.row[j].set(i);
  return t;
}

bool Echelon::insert(BitVector v) {
  if (v.size() != cols_)
    throw validation_error("Echelon: vector length mismatch");
  for (std::size_t r = 0; r < rows_.size(); ++r)
    if (v.get(pivots_[r])) v ^= rows_[r];
  const std::size_t p = v.first_set();
  if (p == BitVector::npos) return false;
  rows_.push_back(std::move(v));
  pivots_.push_back(p);
  return true;
}

bool Echelon::contains(BitVector v) const {
  if (v.size() != cols_)
    throw validation_error("Echelon: vector length mismatch");
  for (std::size_t r = 0; r < rows_.size(); ++r)
    if (v.get(pivots_[r])) v ^= rows_[r];
  return !v.any();
}

std::size_t rank(const BitMatrix& m) {
  Echelon e(m.cols);
  for (const BitVector& r : m.row) e.insert(r);
  return e.rank();
}

std::vector<BitVector> kernel_basis(const BitMatrix& m) {
  // reduced row echelon form
  std::vector<BitVector> rref = m.row;
  std::vector<std::size_t> pivot_col;
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols && r < rref.size(); ++c) {
    std::size_t sel = BitVector::npos;
    for (std::size_t i = r; i < rref.size(); ++i)
      if (rref[i].get(c)) {
        sel = i;
        break;
      }
    if (sel == BitVector::npos) continue;
    std::swap(rref[r], rref[sel]);
    for (std::size_t i = 0; i < rref.size(); ++i)
      if (i != r && rref[i].get(c)) rref[i] ^= rref[r];
    pivot_col.push_back(c);
    ++r;
  }
  std::vector<bool> is_pivot(m.cols, false);
  for (std::size_t c : pivot_col) is_pivot[c] = true;

  std::vector<BitVector> basis;
  for (std::size_t f = 0; f < m.cols; ++f) {
    if (is_pivot[f]) continue;
    BitVector v(m.cols);
    v.set(f);
    for (std::size_t pr = 0; pr < pivot_col.size(); ++pr)
      if (rref[pr].get(f)) v.set(pivot_col[pr]);
    basis.push_back(std::move(v));
  }
  return basis;
}

bool in_span(std::span<const BitVector> basis, const BitVector& v) {
  if (basis.empty()) return !v.any();
  Echelon e(basis[0].size());
  for (const BitVector& b : basis) e.insert(b);
  return e.contains(v);
}

namespace detail {

void check_enumeration(std::span<const BitVector> basis, std::size_t cap) {
  if (basis.size() > cap)
    throw resource_error("span enumeration of 2^" +
                         std::to_string(basis.size()) +
                         " elements exceeds cap 2^" + std::to_string(cap));
  std::size_t len = basis.empty() ? 0 : basis[0].size();
  for (const BitVector& b : basis)
    if (b.size() != len)
      throw validation_error("span basis vectors must share a length");
}

BitVector gray_element(std::span<const BitVector> basis, std::uint64_t t) {
  BitVector x(basis.empty() ? 0 : basis[0].size());
  const std::uint64_t g = t ^ (t >> 1);
  for (std::size_t j = 0; j < basis.size(); ++j)
    if ((g >> j) & 1) x ^= basis[j];
  return x;
}

}  // namespace detail

}  // namespace cssdual::gf2
