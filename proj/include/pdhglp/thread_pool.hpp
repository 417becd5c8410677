#pragma once

#include <condition_variable>
#include <cstdint>
#include <mutex>
#include <thread>
#include <type_traits>
#include <vector>

namespace pdhglp {

// Non-owning reference to a callable taking a task index. Avoids the
// per-call allocation std::function would need; safe because ThreadPool::run
// blocks until every task finished, so the referee outlives all uses.
class TaskRef {
 public:
  template <typename F>
  TaskRef(F&& f)  // NOLINT: implicit by design
      : obj_(const_cast<void*>(static_cast<const void*>(&f))),
        call_([](void* o, std::int64_t t) {
          (*static_cast<std::remove_reference_t<F>*>(o))(t);
        }) {}

  void operator()(std::int64_t t) const { call_(obj_, t); }

 private:
  void* obj_;
  void (*call_)(void*, std::int64_t);
};

// Long-lived worker pool. One instance is created per solve and reused for
// every kernel call; run() hands out task indices and blocks until all tasks
// finish. Task indices are claimed under the pool mutex together with the
// round generation, so a worker can never execute a stale round's function.
// Tasks are coarse (whole shards), which keeps the per-claim lock cost
// irrelevant. Workers never touch shared accumulators: callers give each task
// its own output slot and combine afterwards, which is what keeps results
// independent of the thread count.
class ThreadPool {
 public:
  explicit ThreadPool(int threads) {
    const int extra = threads > 1 ? threads - 1 : 0;
    workers_.reserve(static_cast<size_t>(extra));
    for (int i = 0; i < extra; ++i) {
      workers_.emplace_back([this] { worker_loop(); });
    }
  }

  ThreadPool(const ThreadPool&) = delete;
  ThreadPool& operator=(const ThreadPool&) = delete;

  ~ThreadPool() {
    {
      std::unique_lock<std::mutex> lock(mutex_);
      shutdown_ = true;
    }
    wake_.notify_all();
    for (auto& w : workers_) w.join();
  }

  int thread_count() const { return static_cast<int>(workers_.size()) + 1; }

  // Executes task(0..num_tasks-1), each exactly once, on the calling thread
  // plus the workers. Blocks until every task has finished.
  void run(std::int64_t num_tasks, TaskRef task) {
    if (num_tasks <= 0) return;
    if (workers_.empty() || num_tasks == 1) {
      for (std::int64_t t = 0; t < num_tasks; ++t) task(t);
      return;
    }
    std::unique_lock<std::mutex> lock(mutex_);
    task_ = &task;
    total_ = num_tasks;
    next_ = 0;
    remaining_ = num_tasks;
    ++generation_;
    wake_.notify_all();
    serve(lock);
    done_.wait(lock, [this] { return remaining_ == 0; });
    task_ = nullptr;
  }

 private:
  // Claims and runs tasks of the current round. Called with the lock held;
  // returns with the lock held.
  void serve(std::unique_lock<std::mutex>& lock) {
    while (next_ < total_) {
      const std::int64_t t = next_++;
      const auto* task = task_;
      lock.unlock();
      (*task)(t);
      lock.lock();
      if (--remaining_ == 0) done_.notify_all();
    }
  }

  void worker_loop() {
    std::uint64_t seen = 0;
    std::unique_lock<std::mutex> lock(mutex_);
    while (true) {
      wake_.wait(lock, [&] { return shutdown_ || generation_ != seen; });
      if (shutdown_) return;
      seen = generation_;
      serve(lock);
    }
  }

  std::vector<std::thread> workers_;
  std::mutex mutex_;
  std::condition_variable wake_;
  std::condition_variable done_;
  const TaskRef* task_ = nullptr;
  std::int64_t total_ = 0;
  std::int64_t next_ = 0;
  std::int64_t remaining_ = 0;
  std::uint64_t generation_ = 0;
  bool shutdown_ = false;
};

}  // namespace pdhglp
