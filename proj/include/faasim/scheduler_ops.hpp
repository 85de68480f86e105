#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "faasim/random.hpp"

namespace faasim {

/// Controller-visible worker state used by the dispatch heuristics.
struct WorkerLoadView {
  int worker = 0;
  int queued = 0;  // L_w
  int active = 0;  // N_w (busy + starting instances)
  int load() const { return queued + active; }
};

/// Step-size candidates for the hash progression: the integers in
/// [1, n] coprime to n, so every candidate generates the full cycle.
std::vector<int> ow_step_candidates(int num_sites);

/// OpenWhisk controller heuristic: starting from the hash's home invoker,
/// probe sites with a hash-selected coprime step size and return the
/// first one under the busy level, escalating the level to 2*alpha and
/// 3*alpha; if every site is at or above 3*alpha, pick uniformly at random.
int ow_select_host(std::uint64_t hash, const std::vector<WorkerLoadView>& sites,
                   int busy_alpha, RandomStream& fallback);

enum class BinPackPolicy { FirstFit, NextFit, BestFit };

struct BinPackChoice {
  int worker = 0;
  int factor = 1;  // the minimal capacity-raising factor a
};

/// Finds the minimal integer a >= 1 such that some worker has
/// L_w + N_w < a * z_N, then picks among those workers by policy.
/// NextFit scans from the cursor (the last-used index) onward.
BinPackChoice binpack_select(BinPackPolicy policy,
                             const std::vector<WorkerLoadView>& states,
                             int capacity, int cursor);

/// NOAH's virtual allocations: integer count per (class, worker).
class AllocationMap {
 public:
  AllocationMap(int num_classes, int num_workers)
      : counts_(num_classes, std::vector<int>(num_workers, 0)) {}

  int at(int cls, int worker) const { return counts_[cls][worker]; }
  int class_total(int cls) const;
  int worker_total(int worker) const;
  int num_classes() const { return static_cast<int>(counts_.size()); }
  int num_workers() const {
    return counts_.empty() ? 0 : static_cast<int>(counts_[0].size());
  }

  /// Share of class cls held at worker (phi_{k,w}); 0 if the class has
  /// no allocations.
  double fraction(int cls, int worker) const;

  void add(int cls, int worker, int n = 1) { counts_[cls][worker] += n; }
  void remove(int cls, int worker, int n = 1) { counts_[cls][worker] -= n; }

 private:
  std::vector<std::vector<int>> counts_;
};

struct PlacementResult {
  bool saturated = false;  // targets were capped to fit sum z_C
};

/// Rebalances the map toward the per-class targets. Scale-out prefers the
/// workers already holding the class's largest allocation blocks, then
/// first-fit over free virtual capacity; scale-in removes from the worker
/// holding the fewest allocations of the class. Placement is virtual
/// only; no instances are created or reserved here.
PlacementResult noah_place_allocations(const std::vector<int>& targets,
                                       AllocationMap& map, int per_worker_cap);

}  // namespace faasim
