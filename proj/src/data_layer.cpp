#include "faasim/data_layer.hpp"

#include <stdexcept>

namespace faasim {

DataLayer::DataLayer(SimClock& clock, std::vector<Node*> workers,
                     Node* repository, double memory_mbps, double disk_mbps,
                     double network_mbps)
    : clock_(clock), workers_(std::move(workers)), repository_(repository),
      memory_mbps_(memory_mbps), disk_mbps_(disk_mbps),
      network_mbps_(network_mbps) {}

Node& DataLayer::node(int location) {
  if (location == kRepository) return *repository_;
  return *workers_.at(location);
}

void DataLayer::register_item(DataItem item) {
  if (items_.count(item.name)) {
    throw std::invalid_argument("DataLayer: duplicate item " + item.name);
  }
  AllocId a = repository_->mem.allocate(item.size_mb);
  replicas_[item.name][kRepository] = a;
  items_.emplace(item.name, std::move(item));
}

const DataItem& DataLayer::item(const std::string& name) const {
  auto it = items_.find(name);
  if (it == items_.end()) throw DataMissing("unknown data item: " + name);
  return it->second;
}

bool DataLayer::has_replica(const std::string& name, int location) const {
  auto it = replicas_.find(name);
  return it != replicas_.end() && it->second.count(location) != 0;
}

AllocId DataLayer::replica_alloc(const std::string& name, int location) const {
  auto it = replicas_.find(name);
  if (it == replicas_.end() || !it->second.count(location)) {
    throw DataMissing("no replica of " + name + " at location " +
                      std::to_string(location));
  }
  return it->second.at(location);
}

int DataLayer::pick_source(const DataItem& item, int target) const {
  auto it = replicas_.find(item.name);
  if (it == replicas_.end() || it->second.empty()) {
    throw DataMissing("no replica of " + item.name + " anywhere");
  }
  // Worker replicas beat the repository; among workers, read from the
  // least busy CPU so one host does not serve every transfer. Ties go to
  // the lowest id for determinism.
  int best = kRepository;
  int best_load = 0;
  bool found = false;
  for (const auto& [loc, alloc] : it->second) {
    if (loc == target) continue;
    found = true;
    if (loc == kRepository) continue;
    int load = workers_.at(loc)->cpu.running_count();
    if (best == kRepository || load < best_load ||
        (load == best_load && loc < best)) {
      best = loc;
      best_load = load;
    }
  }
  if (!found) throw DataMissing("no source replica of " + item.name);
  return best;
}

double DataLayer::link_speed(int source, int target) const {
  if (source == kRepository || target == kRepository) return disk_mbps_;
  if (source == target) return memory_mbps_;
  return network_mbps_;
}

void DataLayer::ensure_replicated(const std::string& name, int target,
                                  ReplicateFn cb) {
  item(name);  // validates existence
  if (has_replica(name, target)) {
    if (cb) cb(true);
    return;
  }
  auto key = std::make_pair(name, target);
  auto it = inflight_.find(key);
  if (it != inflight_.end()) {
    it->second.waiters.push_back(std::move(cb));
    return;
  }
  auto& fl = inflight_[key];
  fl.waiters.push_back(std::move(cb));
  start_transfer(name, target);
}

void DataLayer::replicate(const std::string& name, int target, ReplicateFn cb) {
  const DataItem& it = item(name);
  if (has_replica(name, target)) {
    // Local access: a same-worker memory copy, no network leg.
    node(target).mem.read(replica_alloc(name, target), it.size_mb,
                          [cb](ExecStatus s) {
                            if (cb) cb(s == ExecStatus::Completed);
                          });
    return;
  }
  ensure_replicated(name, target, std::move(cb));
}

void DataLayer::start_transfer(const std::string& name, int target) {
  const DataItem& it = items_.at(name);
  auto key = std::make_pair(name, target);
  Inflight& fl = inflight_.at(key);
  int source = pick_source(it, target);
  fl.source = source;
  fl.failed = false;
  fl.legs_pending = 3;
  fl.target_alloc = node(target).mem.allocate(it.size_mb);

  double delay = it.size_mb / link_speed(source, target);
  if (source == kRepository && !pulled_[name]) {
    pulled_[name] = true;
    delay += it.first_pull_delay_s;
  }
  clock_.schedule_after(delay, [this, name, target] {
    leg_done(name, target, true);
  });
  node(source).mem.read(replica_alloc(name, source), it.size_mb,
                        [this, name, target](ExecStatus s) {
                          leg_done(name, target, s == ExecStatus::Completed);
                        });
  node(target).mem.write(fl.target_alloc, it.size_mb,
                         [this, name, target](ExecStatus s) {
                           leg_done(name, target, s == ExecStatus::Completed);
                         });
}

void DataLayer::leg_done(const std::string& name, int target, bool ok) {
  auto key = std::make_pair(name, target);
  auto it = inflight_.find(key);
  if (it == inflight_.end()) return;
  Inflight& fl = it->second;
  if (!ok) fl.failed = true;
  if (--fl.legs_pending > 0) return;

  if (fl.failed) {
    // Source or target replica vanished mid-transfer; retry from another
    // replica (the repository always holds one).
    if (node(target).mem.contains(fl.target_alloc)) {
      node(target).mem.free(fl.target_alloc);
    }
    start_transfer(name, target);
    return;
  }

  AllocId alloc = fl.target_alloc;
  auto waiters = std::move(fl.waiters);
  inflight_.erase(it);
  replicas_[name][target] = alloc;
  node(target).mem.subscribe(alloc, [this, name, target] {
    replicas_[name].erase(target);
    if (replica_evicted_hook) replica_evicted_hook(name, target);
  });
  for (auto& w : waiters) {
    if (w) w(true);
  }
}

}  // namespace faasim
