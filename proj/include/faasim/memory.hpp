#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <vector>

#include "faasim/cpu.hpp"

namespace faasim {

using AllocId = std::uint64_t;

/// Raised when a requested allocation cannot fit even with every other
/// allocation evicted.
class AllocationImpossible : public std::runtime_error {
 public:
  explicit AllocationImpossible(const std::string& what)
      : std::runtime_error(what) {}
};

/// Capacitated memory with strict LRU eviction and write-priority access:
/// at most one write is in service per allocation, a starting write
/// preempts all in-service reads, and reads queue behind pending writes.
/// Reads and writes occupy CPU time (size / read_write_speed) as
/// processor-sharing executions on the owning node's CpuSet.
class Memory {
 public:
  Memory(SimClock& clock, CpuSet& cpu, double capacity_mb, double speed_mbps);

  Memory(const Memory&) = delete;
  Memory& operator=(const Memory&) = delete;

  /// Evicts least-recently-used allocations until the new one fits.
  AllocId allocate(double size_mb);

  /// Registers a callback fired exactly once if the allocation is evicted.
  void subscribe(AllocId id, std::function<void()> on_evict);

  /// Explicit release (no subscriber notification); in-flight operations
  /// on the allocation are aborted.
  void free(AllocId id);

  void write(AllocId id, double mb, CompletionFn on_done);
  void read(AllocId id, double mb, CompletionFn on_done);
  void touch(AllocId id);

  bool contains(AllocId id) const { return allocs_.count(id) != 0; }

  /// Operations on an evicted allocation fail with an eviction error
  /// rather than a contract violation; ids that never existed throw.
  double used_mb() const { return used_mb_; }
  double capacity_mb() const { return capacity_mb_; }
  double speed_mbps() const { return speed_mbps_; }
  std::size_t allocation_count() const { return allocs_.size(); }

  /// Allocation ids in least-recently-used-first order (test hook).
  std::vector<AllocId> lru_order() const;

  /// Observes every eviction (LRU pressure), for churn accounting.
  std::function<void(AllocId)> eviction_hook;

 private:
  struct PendingOp {
    double mb;
    CompletionFn on_done;
  };

  struct Allocation {
    double size_mb;
    std::uint64_t recency;
    std::set<ExecId> reads_in_service;
    std::vector<ExecId> reads_paused;
    ExecId write_in_service = 0;
    CompletionFn write_cb;
    std::deque<PendingOp> write_queue;
    std::deque<PendingOp> read_queue;
    std::vector<std::function<void()>> subscribers;
  };

  bool was_evicted(AllocId id) const;
  void start_write(AllocId id, double mb, CompletionFn cb);
  void start_read(AllocId id, double mb, CompletionFn cb);
  void on_write_done(AllocId id, ExecStatus status);
  void evict(AllocId id, bool notify);
  AllocId lru_victim() const;

  SimClock& clock_;
  CpuSet& cpu_;
  double capacity_mb_;
  double speed_mbps_;
  double used_mb_ = 0.0;
  std::uint64_t next_id_ = 1;
  std::uint64_t touch_seq_ = 0;
  std::map<AllocId, Allocation> allocs_;
};

}  // namespace faasim
