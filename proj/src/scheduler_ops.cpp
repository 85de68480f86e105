#include "faasim/scheduler_ops.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace faasim {

namespace {

int gcd_int(int a, int b) {
  while (b != 0) {
    int t = a % b;
    a = b;
    b = t;
  }
  return a;
}

}  // namespace

std::vector<int> ow_step_candidates(int num_sites) {
  std::vector<int> out;
  for (int i = 1; i <= num_sites; ++i) {
    if (gcd_int(i, num_sites) == 1) out.push_back(i);
  }
  return out;
}

int ow_select_host(std::uint64_t hash, const std::vector<WorkerLoadView>& sites,
                   int busy_alpha, RandomStream& fallback) {
  if (sites.empty()) throw std::invalid_argument("ow_select_host: no sites");
  const int n = static_cast<int>(sites.size());
  auto candidates = ow_step_candidates(n);
  int step = candidates[hash % candidates.size()];
  int home = static_cast<int>(hash % n);
  for (int level = busy_alpha; level <= 3 * busy_alpha; level += busy_alpha) {
    for (int k = 0; k < n; ++k) {
      const auto& site = sites[(home + k * step) % n];
      if (site.load() < level) return site.worker;
    }
  }
  return sites[fallback.uniform_int(n)].worker;
}

BinPackChoice binpack_select(BinPackPolicy policy,
                             const std::vector<WorkerLoadView>& states,
                             int capacity, int cursor) {
  if (states.empty()) throw std::invalid_argument("binpack_select: no workers");
  const int n = static_cast<int>(states.size());
  int min_load = states[0].load();
  for (const auto& s : states) min_load = std::min(min_load, s.load());
  // Smallest a with some worker under a * z_N.
  int factor = std::max(1, min_load / capacity + 1);
  int limit = factor * capacity;

  BinPackChoice out;
  out.factor = factor;
  switch (policy) {
    case BinPackPolicy::FirstFit:
      for (int i = 0; i < n; ++i) {
        if (states[i].load() < limit) {
          out.worker = states[i].worker;
          return out;
        }
      }
      break;
    case BinPackPolicy::NextFit:
      for (int k = 0; k < n; ++k) {
        int i = (cursor + k) % n;
        if (states[i].load() < limit) {
          out.worker = states[i].worker;
          return out;
        }
      }
      break;
    case BinPackPolicy::BestFit: {
      int best = -1, best_residual = 0;
      for (int i = 0; i < n; ++i) {
        int residual = limit - states[i].load();
        if (residual > 0 && (best < 0 || residual < best_residual)) {
          best = i;
          best_residual = residual;
        }
      }
      out.worker = states[best].worker;
      return out;
    }
  }
  throw std::logic_error("binpack_select: no worker under the minimal factor");
}

int AllocationMap::class_total(int cls) const {
  return std::accumulate(counts_[cls].begin(), counts_[cls].end(), 0);
}

int AllocationMap::worker_total(int worker) const {
  int t = 0;
  for (const auto& row : counts_) t += row[worker];
  return t;
}

double AllocationMap::fraction(int cls, int worker) const {
  int total = class_total(cls);
  if (total == 0) return 0.0;
  return static_cast<double>(counts_[cls][worker]) / total;
}

PlacementResult noah_place_allocations(const std::vector<int>& targets,
                                       AllocationMap& map, int per_worker_cap) {
  PlacementResult result;
  const int num_classes = map.num_classes();
  const int num_workers = map.num_workers();
  if (static_cast<int>(targets.size()) != num_classes) {
    throw std::invalid_argument("noah_place_allocations: target size mismatch");
  }

  std::vector<int> capped(targets);
  long total_target = std::accumulate(capped.begin(), capped.end(), 0L);
  long pool_cap = static_cast<long>(per_worker_cap) * num_workers;
  if (total_target > pool_cap) {
    result.saturated = true;
    for (int& t : capped) {
      t = static_cast<int>(static_cast<long>(t) * pool_cap / total_target);
      t = std::max(t, 1);
    }
  }

  // Scale-ins first so released capacity is visible to scale-outs.
  for (int cls = 0; cls < num_classes; ++cls) {
    int current = map.class_total(cls);
    while (current > capped[cls]) {
      // Scale in from the worker holding the fewest allocations.
      int pick = -1, pick_block = 0;
      for (int w = 0; w < num_workers; ++w) {
        int block = map.at(cls, w);
        if (block > 0 && (pick < 0 || block < pick_block)) {
          pick = w;
          pick_block = block;
        }
      }
      if (pick < 0) break;
      map.remove(cls, pick);
      --current;
    }
  }
  for (int cls = 0; cls < num_classes; ++cls) {
    int current = map.class_total(cls);
    while (current < capped[cls]) {
      // Prefer growing the class's largest existing block, then first fit.
      int pick = -1, pick_block = 0;
      for (int w = 0; w < num_workers; ++w) {
        int block = map.at(cls, w);
        if (block > 0 && map.worker_total(w) < per_worker_cap &&
            block > pick_block) {
          pick = w;
          pick_block = block;
        }
      }
      if (pick < 0) {
        for (int w = 0; w < num_workers; ++w) {
          if (map.worker_total(w) < per_worker_cap) {
            pick = w;
            break;
          }
        }
      }
      if (pick < 0) break;  // pool virtually full (possible when saturated)
      map.add(cls, pick);
      ++current;
    }
  }
  return result;
}

}  // namespace faasim
