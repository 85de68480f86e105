#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "faasim/memory.hpp"
#include "faasim/sim_clock.hpp"

namespace faasim {

/// A capacitated host: processor-sharing cores plus LRU memory.
struct Node {
  int id;
  CpuSet cpu;
  Memory mem;

  Node(SimClock& clock, int id_, int cores, double memory_mb, double speed_mbps)
      : id(id_), cpu(clock, cores), mem(clock, cpu, memory_mb, speed_mbps) {}
};

class DataMissing : public std::runtime_error {
 public:
  explicit DataMissing(const std::string& what) : std::runtime_error(what) {}
};

/// Named data item (container image, function code, message, context
/// data). Code items list their dependencies and may carry extra
/// initialization cost.
struct DataItem {
  std::string name;
  double size_mb = 0.0;
  std::vector<std::string> dependencies;  // code only
  double init_extra_work_s = 0.0;
  double init_extra_delay_s = 0.0;
  double first_pull_delay_s = 0.0;  // cold repository cache, first pull only
};

/// Replicates named items between workers and the repository. Replication
/// schedules a read at the source, a write at the target and a transfer
/// timer for the link class, and completes after the last of the three.
/// A location holds at most one replica of an item.
class DataLayer {
 public:
  static constexpr int kRepository = -1;

  DataLayer(SimClock& clock, std::vector<Node*> workers, Node* repository,
            double memory_mbps, double disk_mbps, double network_mbps);

  /// Registers the item and seeds its replica at the repository.
  void register_item(DataItem item);

  const DataItem& item(const std::string& name) const;
  bool has_replica(const std::string& name, int location) const;
  AllocId replica_alloc(const std::string& name, int location) const;

  using ReplicateFn = std::function<void(bool ok)>;

  /// Makes the item present at the target worker; immediate no-op when a
  /// replica is already there. Concurrent requests for the same (item,
  /// target) join the in-flight replication. A source eviction
  /// mid-transfer retries from another replica.
  void ensure_replicated(const std::string& name, int target, ReplicateFn cb);

  /// Access-oriented variant: when the replica already exists at the
  /// target, the access costs one local read of the item at memory speed
  /// instead of a network transfer.
  void replicate(const std::string& name, int target, ReplicateFn cb);

  Node& node(int location);

  /// Observes replica evictions (LRU pressure at a worker).
  std::function<void(const std::string& name, int location)> replica_evicted_hook;

 private:
  struct Inflight {
    std::vector<ReplicateFn> waiters;
    int legs_pending = 0;
    bool failed = false;
    AllocId target_alloc = 0;
    int source = kRepository;
  };

  void start_transfer(const std::string& name, int target);
  void leg_done(const std::string& name, int target, bool ok);
  int pick_source(const DataItem& item, int target) const;
  double link_speed(int source, int target) const;

  SimClock& clock_;
  std::vector<Node*> workers_;
  Node* repository_;
  double memory_mbps_, disk_mbps_, network_mbps_;
  std::map<std::string, DataItem> items_;
  std::map<std::string, std::map<int, AllocId>> replicas_;
  std::map<std::pair<std::string, int>, Inflight> inflight_;
  std::map<std::string, bool> pulled_;
};

}  // namespace faasim
