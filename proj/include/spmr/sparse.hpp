#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace spmr {

template <class T>
struct Triplet {
  std::uint32_t row;
  std::uint32_t col;
  T value;
};

/// Compressed sparse row matrix. Column indices within a row are strictly
/// increasing and explicit zeros are never stored.
template <class T>
class CsrMatrix {
 public:
  CsrMatrix() : row_ptr_(1, 0) {}
  CsrMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), row_ptr_(rows + 1, 0) {}

  CsrMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_ptr,
            std::vector<std::uint32_t> col_idx, std::vector<T> values)
      : rows_(rows),
        cols_(cols),
        row_ptr_(std::move(row_ptr)),
        col_idx_(std::move(col_idx)),
        values_(std::move(values)) {}

  /// Builds from unordered triplets. Duplicates are merged with `combine`
  /// (e.g. sum for counts, max for 0/1 adjacency); zero results are dropped.
  template <class Combine>
  static CsrMatrix from_triplets(std::size_t rows, std::size_t cols, std::vector<Triplet<T>> triplets,
                                 Combine combine) {
    std::sort(triplets.begin(), triplets.end(), [](const Triplet<T>& a, const Triplet<T>& b) {
      return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    CsrMatrix m(rows, cols);
    for (std::size_t t = 0; t < triplets.size();) {
      const auto [r, c, v0] = triplets[t];
      T v = v0;
      std::size_t u = t + 1;
      for (; u < triplets.size() && triplets[u].row == r && triplets[u].col == c; ++u) {
        v = combine(v, triplets[u].value);
      }
      if (v != T{}) {
        m.col_idx_.push_back(c);
        m.values_.push_back(v);
        ++m.row_ptr_[r + 1];
      }
      t = u;
    }
    for (std::size_t r = 0; r < rows; ++r) m.row_ptr_[r + 1] += m.row_ptr_[r];
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nnz() const { return values_.size(); }

  std::span<const std::uint32_t> row_cols(std::size_t r) const {
    return {col_idx_.data() + row_ptr_[r], row_ptr_[r + 1] - row_ptr_[r]};
  }
  std::span<const T> row_values(std::size_t r) const {
    return {values_.data() + row_ptr_[r], row_ptr_[r + 1] - row_ptr_[r]};
  }

  const std::vector<std::size_t>& row_ptr() const { return row_ptr_; }
  const std::vector<std::uint32_t>& col_idx() const { return col_idx_; }
  const std::vector<T>& values() const { return values_; }

  /// Entry lookup by binary search; zero when not stored.
  T at(std::size_t r, std::size_t c) const {
    const auto cols = row_cols(r);
    const auto it = std::lower_bound(cols.begin(), cols.end(), static_cast<std::uint32_t>(c));
    if (it == cols.end() || *it != c) return T{};
    return values_[row_ptr_[r] + static_cast<std::size_t>(it - cols.begin())];
  }

  CsrMatrix transpose() const {
    CsrMatrix t(cols_, rows_);
    for (auto c : col_idx_) ++t.row_ptr_[c + 1];
    for (std::size_t r = 0; r < cols_; ++r) t.row_ptr_[r + 1] += t.row_ptr_[r];
    t.col_idx_.resize(nnz());
    t.values_.resize(nnz());
    std::vector<std::size_t> fill(t.row_ptr_.begin(), t.row_ptr_.end() - 1);
    for (std::size_t r = 0; r < rows_; ++r) {
      for (std::size_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) {
        const std::size_t dst = fill[col_idx_[p]]++;
        t.col_idx_[dst] = static_cast<std::uint32_t>(r);
        t.values_[dst] = values_[p];
      }
    }
    return t;
  }

  std::vector<Triplet<T>> triplets() const {
    std::vector<Triplet<T>> out;
    out.reserve(nnz());
    for (std::size_t r = 0; r < rows_; ++r) {
      for (std::size_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) {
        out.push_back({static_cast<std::uint32_t>(r), col_idx_[p], values_[p]});
      }
    }
    return out;
  }

  /// Drops stored diagonal entries.
  CsrMatrix without_diagonal() const {
    CsrMatrix out(rows_, cols_);
    for (std::size_t r = 0; r < rows_; ++r) {
      for (std::size_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) {
        if (col_idx_[p] == r) continue;
        out.col_idx_.push_back(col_idx_[p]);
        out.values_.push_back(values_[p]);
      }
      out.row_ptr_[r + 1] = out.col_idx_.size();
    }
    return out;
  }

  friend bool operator==(const CsrMatrix& a, const CsrMatrix& b) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_ptr_;
  std::vector<std::uint32_t> col_idx_;
  std::vector<T> values_;
};

using CountCsr = CsrMatrix<std::uint64_t>;
using RealCsr = CsrMatrix<double>;

inline constexpr std::size_t kUnlimitedNnz = std::numeric_limits<std::size_t>::max();

/// Sparse product a*b over 64-bit counts, row-parallel (OpenMP).
/// Throws ResourceError when the product would hold more than `max_nnz`
/// entries or an entry overflows 64 bits.
CountCsr multiply(const CountCsr& a, const CountCsr& b, std::size_t max_nnz = kUnlimitedNnz);

/// Single-threaded reference for `multiply`; same contract.
CountCsr multiply_reference(const CountCsr& a, const CountCsr& b, std::size_t max_nnz = kUnlimitedNnz);

}  // namespace spmr
