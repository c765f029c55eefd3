#pragma once

#include <span>
#include <vector>

#include "wsm/graph.hpp"

namespace wsm {

// Matrix over GF(2) stored as bit-rows.
class Gf2Matrix {
 public:
  Gf2Matrix(std::size_t rows, std::size_t cols) : rows_(rows, VertexSet(cols)), cols_(cols) {}

  explicit Gf2Matrix(std::vector<std::vector<int>> entries) : cols_(0) {
    if (!entries.empty()) cols_ = entries.front().size();
    for (const auto& r : entries) {
      if (r.size() != cols_) throw ContractViolation("ragged GF(2) matrix");
      VertexSet bits(cols_);
      for (std::size_t j = 0; j < cols_; ++j)
        if (r[j] & 1) bits.set(j);
      rows_.push_back(std::move(bits));
    }
  }

  std::size_t rows() const noexcept { return rows_.size(); }
  std::size_t cols() const noexcept { return cols_; }
  bool at(std::size_t i, std::size_t j) const { return rows_[i].test(j); }
  void set(std::size_t i, std::size_t j, bool value = true) { rows_[i].set(j, value); }
  const std::vector<VertexSet>& bit_rows() const noexcept { return rows_; }

  Gf2Matrix transposed() const {
    Gf2Matrix t(cols_, rows());
    for (std::size_t i = 0; i < rows(); ++i)
      for (std::size_t j = 0; j < cols_; ++j)
        if (at(i, j)) t.set(j, i);
    return t;
  }

 private:
  std::vector<VertexSet> rows_;
  std::size_t cols_;
};

// Rank by Gaussian elimination; consumes its argument.
inline std::size_t gf2_rank_rows(std::vector<VertexSet> rows) {
  std::size_t rank = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto pivot = rows[i].find_first();
    if (pivot == VertexSet::npos) continue;
    ++rank;
    for (std::size_t j = i + 1; j < rows.size(); ++j)
      if (rows[j].test(pivot)) rows[j] ^= rows[i];
  }
  return rank;
}

inline std::size_t gf2_rank(const Gf2Matrix& m) { return gf2_rank_rows(m.bit_rows()); }

// Same elimination on 64-bit rows; the hot path of the exhaustive routines.
inline int gf2_rank_masks(std::span<Mask> rows) {
  int rank = 0;
  std::size_t live = rows.size();
  std::size_t i = 0;
  while (i < live) {
    const Mask r = rows[i];
    if (r == 0) {
      rows[i] = rows[--live];
      continue;
    }
    ++rank;
    const Mask low = r & (~r + 1);
    for (std::size_t j = i + 1; j < live; ++j)
      if (rows[j] & low) rows[j] ^= r;
    ++i;
  }
  return rank;
}

}  // namespace wsm
