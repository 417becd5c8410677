#pragma once

#include <vector>

#include "pdhglp/core.hpp"

namespace pdhglp {

// Static partition of [0, dim) into contiguous shards. The plan is the unit
// of parallel work distribution and, because reductions are always combined
// in ascending shard order, it fully determines floating-point results
// regardless of how many threads execute it.
struct ShardPlan {
  Index dim = 0;
  std::vector<Index> boundary;  // size num_shards()+1, boundary.front()==0, boundary.back()==dim

  Index num_shards() const { return static_cast<Index>(boundary.size()) - 1; }
  Index begin(Index s) const { return boundary[static_cast<size_t>(s)]; }
  Index end(Index s) const { return boundary[static_cast<size_t>(s) + 1]; }
};

// Even split: num_shards = threads * shards_per_thread, earlier shards larger
// by at most one element. Empty shards appear only when dim < num_shards.
inline ShardPlan make_shard_plan(Index dim, int threads, int shards_per_thread = 4) {
  if (threads < 1) threads = 1;
  if (shards_per_thread < 1) shards_per_thread = 1;
  const Index shards = static_cast<Index>(threads) * shards_per_thread;
  ShardPlan plan;
  plan.dim = dim;
  plan.boundary.resize(static_cast<size_t>(shards) + 1);
  const Index base = dim / shards;
  const Index rem = dim % shards;
  Index pos = 0;
  plan.boundary[0] = 0;
  for (Index s = 0; s < shards; ++s) {
    pos += base + (s < rem ? 1 : 0);
    plan.boundary[static_cast<size_t>(s) + 1] = pos;
  }
  return plan;
}

}  // namespace pdhglp
