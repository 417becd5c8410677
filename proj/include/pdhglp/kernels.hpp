#pragma once

#include <cmath>
#include <vector>

#include "pdhglp/core.hpp"
#include "pdhglp/shard.hpp"
#include "pdhglp/sparse.hpp"
#include "pdhglp/thread_pool.hpp"

namespace pdhglp {

// Scratch for shard-local reduction partials, sized once per solve. Partials
// are always combined sequentially in ascending shard order, so a fixed plan
// gives bit-identical results for any pool size.
struct ReduceScratch {
  std::vector<Scalar> partial;

  void ensure(Index shards) {
    if (static_cast<Index>(partial.size()) < shards) {
      partial.resize(static_cast<size_t>(shards));
    }
  }
};

namespace kernels {

// out = A * x, sharded over rows (row form). Each row accumulates in storage
// order; rows are owned by exactly one shard.
inline void spmv(ThreadPool& pool, const ShardPlan& row_plan, const SparseMatrix& a,
                 const Vector& x, Vector& out) {
  pool.run(row_plan.num_shards(), [&](Index s) {
    for (Index r = row_plan.begin(s); r < row_plan.end(s); ++r) {
      Scalar acc = 0.0;
      for (Index k = a.by_row.start[static_cast<size_t>(r)];
           k < a.by_row.start[static_cast<size_t>(r) + 1]; ++k) {
        acc += a.by_row.value[static_cast<size_t>(k)] *
               x[static_cast<size_t>(a.by_row.index[static_cast<size_t>(k)])];
      }
      out[static_cast<size_t>(r)] = acc;
    }
  });
}

// out = A^T * y, sharded over columns (column form).
inline void spmv_transpose(ThreadPool& pool, const ShardPlan& col_plan, const SparseMatrix& a,
                           const Vector& y, Vector& out) {
  pool.run(col_plan.num_shards(), [&](Index s) {
    for (Index c = col_plan.begin(s); c < col_plan.end(s); ++c) {
      Scalar acc = 0.0;
      for (Index k = a.by_col.start[static_cast<size_t>(c)];
           k < a.by_col.start[static_cast<size_t>(c) + 1]; ++k) {
        acc += a.by_col.value[static_cast<size_t>(k)] *
               y[static_cast<size_t>(a.by_col.index[static_cast<size_t>(k)])];
      }
      out[static_cast<size_t>(c)] = acc;
    }
  });
}

template <typename PerElement>
inline void for_each(ThreadPool& pool, const ShardPlan& plan, PerElement&& fn) {
  pool.run(plan.num_shards(), [&](Index s) {
    for (Index i = plan.begin(s); i < plan.end(s); ++i) fn(i);
  });
}

// Shard-local partials of fn summed in ascending shard order.
template <typename PerElement>
inline Scalar reduce_sum(ThreadPool& pool, const ShardPlan& plan, ReduceScratch& scratch,
                         PerElement&& fn) {
  scratch.ensure(plan.num_shards());
  pool.run(plan.num_shards(), [&](Index s) {
    Scalar acc = 0.0;
    for (Index i = plan.begin(s); i < plan.end(s); ++i) acc += fn(i);
    scratch.partial[static_cast<size_t>(s)] = acc;
  });
  Scalar total = 0.0;
  for (Index s = 0; s < plan.num_shards(); ++s) total += scratch.partial[static_cast<size_t>(s)];
  return total;
}

template <typename PerElement>
inline Scalar reduce_max(ThreadPool& pool, const ShardPlan& plan, ReduceScratch& scratch,
                         PerElement&& fn) {
  scratch.ensure(plan.num_shards());
  pool.run(plan.num_shards(), [&](Index s) {
    Scalar acc = 0.0;
    for (Index i = plan.begin(s); i < plan.end(s); ++i) acc = std::max(acc, fn(i));
    scratch.partial[static_cast<size_t>(s)] = acc;
  });
  Scalar total = 0.0;
  for (Index s = 0; s < plan.num_shards(); ++s) {
    total = std::max(total, scratch.partial[static_cast<size_t>(s)]);
  }
  return total;
}

inline Scalar dot(ThreadPool& pool, const ShardPlan& plan, ReduceScratch& scratch,
                  const Vector& a, const Vector& b) {
  return reduce_sum(pool, plan, scratch, [&](Index i) {
    return a[static_cast<size_t>(i)] * b[static_cast<size_t>(i)];
  });
}

inline Scalar norm_sq(ThreadPool& pool, const ShardPlan& plan, ReduceScratch& scratch,
                      const Vector& a) {
  return reduce_sum(pool, plan, scratch, [&](Index i) {
    const Scalar v = a[static_cast<size_t>(i)];
    return v * v;
  });
}

// sum_i (a2[i]-a1[i])^2 without materializing the difference.
inline Scalar diff_norm_sq(ThreadPool& pool, const ShardPlan& plan, ReduceScratch& scratch,
                           const Vector& a2, const Vector& a1) {
  return reduce_sum(pool, plan, scratch, [&](Index i) {
    const Scalar v = a2[static_cast<size_t>(i)] - a1[static_cast<size_t>(i)];
    return v * v;
  });
}

// sum_i (a2[i]-a1[i]) * (b2[i]-b1[i]) without materializing differences.
inline Scalar diff_dot(ThreadPool& pool, const ShardPlan& plan, ReduceScratch& scratch,
                       const Vector& a2, const Vector& a1, const Vector& b2, const Vector& b1) {
  return reduce_sum(pool, plan, scratch, [&](Index i) {
    return (a2[static_cast<size_t>(i)] - a1[static_cast<size_t>(i)]) *
           (b2[static_cast<size_t>(i)] - b1[static_cast<size_t>(i)]);
  });
}

// sum_i a[i] * (b2[i]-b1[i]) without materializing the difference.
inline Scalar dot_with_diff(ThreadPool& pool, const ShardPlan& plan, ReduceScratch& scratch,
                            const Vector& a, const Vector& b2, const Vector& b1) {
  return reduce_sum(pool, plan, scratch, [&](Index i) {
    return a[static_cast<size_t>(i)] *
           (b2[static_cast<size_t>(i)] - b1[static_cast<size_t>(i)]);
  });
}

inline Scalar inf_norm(ThreadPool& pool, const ShardPlan& plan, ReduceScratch& scratch,
                       const Vector& a) {
  return reduce_max(pool, plan, scratch,
                    [&](Index i) { return std::abs(a[static_cast<size_t>(i)]); });
}

inline void project_box(ThreadPool& pool, const ShardPlan& plan, const Vector& v,
                        const Vector& lo, const Vector& hi, Vector& out) {
  for_each(pool, plan, [&](Index i) {
    out[static_cast<size_t>(i)] =
        clamp(v[static_cast<size_t>(i)], lo[static_cast<size_t>(i)], hi[static_cast<size_t>(i)]);
  });
}

}  // namespace kernels

// Execution context shared by every kernel call of one solve: the pool, the
// two shard plans (primal dimension n, dual dimension m), and reduction
// scratch. Plans are fixed at construction; results depend on them but not on
// how many threads execute them.
struct Executor {
  ThreadPool pool;
  ShardPlan x_plan;  // over columns / primal coordinates
  ShardPlan y_plan;  // over rows / dual coordinates
  ReduceScratch scratch;

  Executor(Index num_cols, Index num_rows, int threads, int shards_per_thread = 4)
      : pool(threads),
        x_plan(make_shard_plan(num_cols, threads, shards_per_thread)),
        y_plan(make_shard_plan(num_rows, threads, shards_per_thread)) {
    scratch.ensure(std::max(x_plan.num_shards(), y_plan.num_shards()));
  }
};

// sqrt(omega * |x|^2 + |y|^2 / omega), the solver's joint norm.
inline Scalar weighted_norm(Executor& ex, const Vector& x, const Vector& y, Scalar omega) {
  const Scalar nx = kernels::norm_sq(ex.pool, ex.x_plan, ex.scratch, x);
  const Scalar ny = kernels::norm_sq(ex.pool, ex.y_plan, ex.scratch, y);
  return std::sqrt(omega * nx + ny / omega);
}

}  // namespace pdhglp
