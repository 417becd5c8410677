#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "pdhglp/core.hpp"

namespace pdhglp {

struct Triplet {
  Index row = 0;
  Index col = 0;
  Scalar value = 0.0;
};

// One compressed orientation: start has primary_dim+1 entries, and slot k in
// [start[p], start[p+1]) holds (index[k], value[k]) = one entry of primary
// line p. Entries within a line are sorted by secondary index, so traversal
// order (and therefore floating-point accumulation order) is canonical.
struct CompressedLayout {
  std::vector<Index> start;
  std::vector<Index> index;
  std::vector<Scalar> value;

  Index primary_dim() const { return static_cast<Index>(start.size()) - 1; }
  Index nonzeros() const { return static_cast<Index>(value.size()); }
};

// Sparse matrix stored in both row-major and column-major form. The row form
// drives products A*x (each row owned by one shard), the column form drives
// A^T*y (each column owned by one shard); neither product needs atomics.
struct SparseMatrix {
  Index rows = 0;
  Index cols = 0;
  CompressedLayout by_row;
  CompressedLayout by_col;

  Index nonzeros() const { return by_row.nonzeros(); }

  static SparseMatrix from_triplets(Index rows, Index cols, const std::vector<Triplet>& entries);
};

namespace detail {

// Builds one orientation from triplets: counting sort by primary index, then
// per-line sort by secondary index with duplicates summed.
inline CompressedLayout build_layout(Index primary_dim, const std::vector<Triplet>& entries,
                                     bool row_primary) {
  CompressedLayout out;
  out.start.assign(static_cast<size_t>(primary_dim) + 1, 0);
  for (const Triplet& t : entries) {
    const Index p = row_primary ? t.row : t.col;
    ++out.start[static_cast<size_t>(p) + 1];
  }
  for (Index p = 0; p < primary_dim; ++p) {
    out.start[static_cast<size_t>(p) + 1] += out.start[static_cast<size_t>(p)];
  }
  const Index nnz = out.start.back();
  out.index.resize(static_cast<size_t>(nnz));
  out.value.resize(static_cast<size_t>(nnz));
  std::vector<Index> cursor(out.start.begin(), out.start.end() - 1);
  for (const Triplet& t : entries) {
    const Index p = row_primary ? t.row : t.col;
    const Index s = row_primary ? t.col : t.row;
    const Index k = cursor[static_cast<size_t>(p)]++;
    out.index[static_cast<size_t>(k)] = s;
    out.value[static_cast<size_t>(k)] = t.value;
  }
  // Sort each line by secondary index and merge duplicates in place.
  std::vector<std::pair<Index, Scalar>> line;
  Index write = 0;
  std::vector<Index> new_start(out.start.size());
  new_start[0] = 0;
  for (Index p = 0; p < primary_dim; ++p) {
    const Index lo = out.start[static_cast<size_t>(p)];
    const Index hi = out.start[static_cast<size_t>(p) + 1];
    line.clear();
    for (Index k = lo; k < hi; ++k) {
      line.emplace_back(out.index[static_cast<size_t>(k)], out.value[static_cast<size_t>(k)]);
    }
    std::stable_sort(line.begin(), line.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    size_t i = 0;
    while (i < line.size()) {
      Scalar sum = line[i].second;
      size_t j = i + 1;
      while (j < line.size() && line[j].first == line[i].first) {
        sum += line[j].second;
        ++j;
      }
      out.index[static_cast<size_t>(write)] = line[i].first;
      out.value[static_cast<size_t>(write)] = sum;
      ++write;
      i = j;
    }
    new_start[static_cast<size_t>(p) + 1] = write;
  }
  out.start = std::move(new_start);
  out.index.resize(static_cast<size_t>(write));
  out.value.resize(static_cast<size_t>(write));
  return out;
}

}  // namespace detail

inline SparseMatrix SparseMatrix::from_triplets(Index rows, Index cols,
                                                const std::vector<Triplet>& entries) {
  SparseMatrix m;
  m.rows = rows;
  m.cols = cols;
  m.by_row = detail::build_layout(rows, entries, true);
  m.by_col = detail::build_layout(cols, entries, false);
  return m;
}

// True when both layouts describe the same matrix entry for entry.
inline bool layouts_consistent(const SparseMatrix& m) {
  if (m.by_row.primary_dim() != m.rows || m.by_col.primary_dim() != m.cols) return false;
  if (m.by_row.nonzeros() != m.by_col.nonzeros()) return false;
  std::vector<Triplet> from_col;
  from_col.reserve(static_cast<size_t>(m.by_col.nonzeros()));
  for (Index c = 0; c < m.cols; ++c) {
    for (Index k = m.by_col.start[static_cast<size_t>(c)];
         k < m.by_col.start[static_cast<size_t>(c) + 1]; ++k) {
      from_col.push_back({m.by_col.index[static_cast<size_t>(k)], c,
                          m.by_col.value[static_cast<size_t>(k)]});
    }
  }
  CompressedLayout rebuilt = detail::build_layout(m.rows, from_col, true);
  return rebuilt.start == m.by_row.start && rebuilt.index == m.by_row.index &&
         rebuilt.value == m.by_row.value;
}

}  // namespace pdhglp
