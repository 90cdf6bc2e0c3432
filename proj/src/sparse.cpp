#include "spmr/sparse.hpp"

#include <atomic>
#include <map>
#include <numeric>
#include <string>

#include "spmr/errors.hpp"

namespace spmr {

namespace {

void check_shapes(const CountCsr& a, const CountCsr& b) {
  if (a.cols() != b.rows()) {
    throw ArgumentError("sparse product shape mismatch: " + std::to_string(a.rows()) + "x" +
                        std::to_string(a.cols()) + " times " + std::to_string(b.rows()) + "x" +
                        std::to_string(b.cols()));
  }
}

[[noreturn]] void throw_budget(std::size_t nnz, std::size_t max_nnz) {
  throw ResourceError("product needs " + std::to_string(nnz) + " nonzeros, budget is " +
                      std::to_string(max_nnz));
}

[[noreturn]] void throw_overflow() { throw ResourceError("path count overflows 64 bits"); }

}  // namespace

CountCsr multiply(const CountCsr& a, const CountCsr& b, std::size_t max_nnz) {
  check_shapes(a, b);
  const std::size_t rows = a.rows();
  const std::size_t cols = b.cols();
  const auto rows_i = static_cast<std::int64_t>(rows);

  // Symbolic pass: exact nnz per output row.
  std::vector<std::size_t> row_ptr(rows + 1, 0);
#pragma omp parallel
  {
    std::vector<std::int64_t> marker(cols, -1);
#pragma omp for schedule(dynamic, 64)
    for (std::int64_t i = 0; i < rows_i; ++i) {
      std::size_t count = 0;
      for (auto k : a.row_cols(static_cast<std::size_t>(i))) {
        for (auto j : b.row_cols(k)) {
          if (marker[j] != i) {
            marker[j] = i;
            ++count;
          }
        }
      }
      row_ptr[static_cast<std::size_t>(i) + 1] = count;
    }
  }
  std::partial_sum(row_ptr.begin(), row_ptr.end(), row_ptr.begin());
  const std::size_t nnz = row_ptr.back();
  if (nnz > max_nnz) throw_budget(nnz, max_nnz);

  std::vector<std::uint32_t> col_idx(nnz);
  std::vector<std::uint64_t> values(nnz);
  std::atomic<bool> overflow{false};

  // Numeric pass: dense accumulator per thread, columns emitted sorted.
#pragma omp parallel
  {
    std::vector<std::uint64_t> acc(cols, 0);
    std::vector<std::uint32_t> touched;
#pragma omp for schedule(dynamic, 64)
    for (std::int64_t ii = 0; ii < rows_i; ++ii) {
      const auto i = static_cast<std::size_t>(ii);
      touched.clear();
      const auto a_cols = a.row_cols(i);
      const auto a_vals = a.row_values(i);
      for (std::size_t p = 0; p < a_cols.size(); ++p) {
        const auto b_cols = b.row_cols(a_cols[p]);
        const auto b_vals = b.row_values(a_cols[p]);
        for (std::size_t q = 0; q < b_cols.size(); ++q) {
          std::uint64_t prod = 0;
          if (__builtin_mul_overflow(a_vals[p], b_vals[q], &prod)) overflow = true;
          const auto j = b_cols[q];
          if (acc[j] == 0) touched.push_back(j);
          if (__builtin_add_overflow(acc[j], prod, &acc[j])) overflow = true;
        }
      }
      std::sort(touched.begin(), touched.end());
      std::size_t dst = row_ptr[i];
      for (auto j : touched) {
        col_idx[dst] = j;
        values[dst] = acc[j];
        acc[j] = 0;
        ++dst;
      }
    }
  }
  if (overflow) throw_overflow();
  return CountCsr(rows, cols, std::move(row_ptr), std::move(col_idx), std::move(values));
}

CountCsr multiply_reference(const CountCsr& a, const CountCsr& b, std::size_t max_nnz) {
  check_shapes(a, b);
  std::vector<Triplet<std::uint64_t>> out;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    std::map<std::uint32_t, std::uint64_t> row;
    const auto a_cols = a.row_cols(i);
    const auto a_vals = a.row_values(i);
    for (std::size_t p = 0; p < a_cols.size(); ++p) {
      const auto b_cols = b.row_cols(a_cols[p]);
      const auto b_vals = b.row_values(a_cols[p]);
      for (std::size_t q = 0; q < b_cols.size(); ++q) {
        std::uint64_t prod = 0;
        if (__builtin_mul_overflow(a_vals[p], b_vals[q], &prod)) throw_overflow();
        auto& slot = row[b_cols[q]];
        if (__builtin_add_overflow(slot, prod, &slot)) throw_overflow();
      }
    }
    for (const auto& [j, v] : row) out.push_back({static_cast<std::uint32_t>(i), j, v});
    if (out.size() > max_nnz) throw_budget(out.size(), max_nnz);
  }
  return CountCsr::from_triplets(a.rows(), b.cols(), std::move(out),
                                 [](std::uint64_t x, std::uint64_t) { return x; });
}

}  // namespace spmr
