#pragma once

#include <random>
#include <vector>

#include "pdhglp/problem.hpp"
#include "pdhglp/sparse.hpp"

namespace testutil {

using pdhglp::Index;
using pdhglp::kInf;
using pdhglp::LpProblem;
using pdhglp::Scalar;
using pdhglp::SparseMatrix;
using pdhglp::Triplet;
using pdhglp::Vector;

using Rng = std::mt19937_64;

inline Scalar uniform(Rng& rng, Scalar lo, Scalar hi) {
  return std::uniform_real_distribution<Scalar>(lo, hi)(rng);
}

inline std::vector<Triplet> random_triplets(Rng& rng, Index rows, Index cols, double density,
                                            Scalar lo = -1.0, Scalar hi = 1.0) {
  std::vector<Triplet> t;
  std::bernoulli_distribution keep(density);
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) {
      if (keep(rng)) t.push_back({r, c, uniform(rng, lo, hi)});
    }
  }
  return t;
}

inline SparseMatrix random_matrix(Rng& rng, Index rows, Index cols, double density,
                                  Scalar lo = -1.0, Scalar hi = 1.0) {
  return SparseMatrix::from_triplets(rows, cols, random_triplets(rng, rows, cols, density, lo, hi));
}

inline Vector random_vector(Rng& rng, Index n, Scalar lo = -1.0, Scalar hi = 1.0) {
  Vector v(static_cast<size_t>(n));
  for (auto& e : v) e = uniform(rng, lo, hi);
  return v;
}

// Plain dense reference products, deliberately independent of the sharded
// kernels (same left-to-right accumulation a single-shard plan uses).
inline Vector dense_spmv(const SparseMatrix& a, const Vector& x) {
  Vector out(static_cast<size_t>(a.rows), 0.0);
  for (Index r = 0; r < a.rows; ++r) {
    Scalar acc = 0.0;
    for (Index k = a.by_row.start[static_cast<size_t>(r)];
         k < a.by_row.start[static_cast<size_t>(r) + 1]; ++k) {
      acc += a.by_row.value[static_cast<size_t>(k)] *
             x[static_cast<size_t>(a.by_row.index[static_cast<size_t>(k)])];
    }
    out[static_cast<size_t>(r)] = acc;
  }
  return out;
}

inline Vector dense_spmv_transpose(const SparseMatrix& a, const Vector& y) {
  Vector out(static_cast<size_t>(a.cols), 0.0);
  for (Index c = 0; c < a.cols; ++c) {
    Scalar acc = 0.0;
    for (Index k = a.by_col.start[static_cast<size_t>(c)];
         k < a.by_col.start[static_cast<size_t>(c) + 1]; ++k) {
      acc += a.by_col.value[static_cast<size_t>(k)] *
             y[static_cast<size_t>(a.by_col.index[static_cast<size_t>(k)])];
    }
    out[static_cast<size_t>(c)] = acc;
  }
  return out;
}

inline std::vector<std::vector<Scalar>> to_dense(const SparseMatrix& a) {
  std::vector<std::vector<Scalar>> d(static_cast<size_t>(a.rows),
                                     std::vector<Scalar>(static_cast<size_t>(a.cols), 0.0));
  for (Index r = 0; r < a.rows; ++r) {
    for (Index k = a.by_row.start[static_cast<size_t>(r)];
         k < a.by_row.start[static_cast<size_t>(r) + 1]; ++k) {
      d[static_cast<size_t>(r)][static_cast<size_t>(a.by_row.index[static_cast<size_t>(k)])] +=
          a.by_row.value[static_cast<size_t>(k)];
    }
  }
  return d;
}

// min -x1 - 2 x2, x1 + x2 <= 1, x >= 0. Optimum x = (0, 1), y = -2,
// reduced costs (1, 0), both objectives -2.
inline LpProblem tiny_lp() {
  LpProblem p;
  p.a = SparseMatrix::from_triplets(1, 2, {{0, 0, 1.0}, {0, 1, 1.0}});
  p.objective = {-1.0, -2.0};
  p.con_lower = {-kInf};
  p.con_upper = {1.0};
  p.var_lower = {0.0, 0.0};
  p.var_upper = {kInf, kInf};
  return p;
}

}  // namespace testutil
