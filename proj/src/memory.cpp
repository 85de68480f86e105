#include "faasim/memory.hpp"

#include <algorithm>
#include <limits>
#include <memory>

namespace faasim {

namespace {
constexpr double kSizeEps = 1e-9;
}

Memory::Memory(SimClock& clock, CpuSet& cpu, double capacity_mb,
               double speed_mbps)
    : clock_(clock), cpu_(cpu), capacity_mb_(capacity_mb),
      speed_mbps_(speed_mbps) {
  if (capacity_mb <= 0 || speed_mbps <= 0) {
    throw std::invalid_argument("Memory: capacity and speed must be positive");
  }
}

AllocId Memory::allocate(double size_mb) {
  if (size_mb < 0) throw std::invalid_argument("Memory: negative size");
  if (size_mb > capacity_mb_ + kSizeEps) {
    throw AllocationImpossible("allocation exceeds memory capacity");
  }
  while (used_mb_ + size_mb > capacity_mb_ + kSizeEps) {
    evict(lru_victim(), true);
  }
  AllocId id = next_id_++;
  auto& a = allocs_[id];
  a.size_mb = size_mb;
  a.recency = ++touch_seq_;
  used_mb_ += size_mb;
  return id;
}

void Memory::subscribe(AllocId id, std::function<void()> on_evict) {
  auto it = allocs_.find(id);
  if (it == allocs_.end()) {
    if (was_evicted(id)) {
      if (on_evict) on_evict();  // already gone; notify now, exactly once
      return;
    }
    throw std::logic_error("Memory: unknown allocation");
  }
  it->second.subscribers.push_back(std::move(on_evict));
}

bool Memory::was_evicted(AllocId id) const {
  return id > 0 && id < next_id_ && allocs_.count(id) == 0;
}

void Memory::touch(AllocId id) {
  auto it = allocs_.find(id);
  if (it == allocs_.end()) {
    if (was_evicted(id)) return;
    throw std::logic_error("Memory: unknown allocation");
  }
  it->second.recency = ++touch_seq_;
}

void Memory::free(AllocId id) {
  if (!contains(id)) return;
  evict(id, false);
}

AllocId Memory::lru_victim() const {
  AllocId victim = 0;
  std::uint64_t oldest = std::numeric_limits<std::uint64_t>::max();
  for (const auto& [id, a] : allocs_) {
    if (a.recency < oldest) {
      oldest = a.recency;
      victim = id;
    }
  }
  if (victim == 0) {
    throw std::logic_error("Memory: eviction requested with no allocations");
  }
  return victim;
}

std::vector<AllocId> Memory::lru_order() const {
  std::vector<AllocId> ids;
  ids.reserve(allocs_.size());
  for (const auto& [id, a] : allocs_) ids.push_back(id);
  std::sort(ids.begin(), ids.end(), [this](AllocId x, AllocId y) {
    return allocs_.at(x).recency < allocs_.at(y).recency;
  });
  return ids;
}

void Memory::write(AllocId id, double mb, CompletionFn on_done) {
  auto it = allocs_.find(id);
  if (it == allocs_.end()) {
    if (was_evicted(id)) {
      if (on_done) on_done(ExecStatus::Aborted);
      return;
    }
    throw std::logic_error("Memory: unknown allocation");
  }
  it->second.recency = ++touch_seq_;
  if (it->second.write_in_service != 0 || !it->second.write_queue.empty()) {
    it->second.write_queue.push_back({mb, std::move(on_done)});
    return;
  }
  start_write(id, mb, std::move(on_done));
}

void Memory::start_write(AllocId id, double mb, CompletionFn cb) {
  auto& a = allocs_.at(id);
  // A write preempts all current reads; they keep their remaining demand
  // and resume once the write queue drains.
  for (ExecId exec : a.reads_in_service) {
    if (std::find(a.reads_paused.begin(), a.reads_paused.end(), exec) ==
        a.reads_paused.end()) {
      cpu_.pause(exec);
      a.reads_paused.push_back(exec);
    }
  }
  a.write_cb = std::move(cb);
  a.write_in_service = cpu_.submit(
      mb / speed_mbps_, ExecKind::MemWrite,
      [this, id](ExecStatus s) { on_write_done(id, s); });
}

void Memory::on_write_done(AllocId id, ExecStatus status) {
  auto it = allocs_.find(id);
  if (it == allocs_.end()) return;  // eviction already failed the caller
  auto& a = it->second;
  CompletionFn cb = std::move(a.write_cb);
  a.write_in_service = 0;
  a.write_cb = nullptr;
  if (cb) cb(status);
  if (!contains(id)) return;  // callback may have evicted the allocation
  if (!a.write_queue.empty()) {
    PendingOp next = std::move(a.write_queue.front());
    a.write_queue.pop_front();
    start_write(id, next.mb, std::move(next.on_done));
    return;
  }
  for (ExecId exec : a.reads_paused) cpu_.resume(exec);
  a.reads_paused.clear();
  auto queued = std::move(a.read_queue);
  a.read_queue.clear();
  for (auto& op : queued) start_read(id, op.mb, std::move(op.on_done));
}

void Memory::read(AllocId id, double mb, CompletionFn on_done) {
  auto it = allocs_.find(id);
  if (it == allocs_.end()) {
    if (was_evicted(id)) {
      if (on_done) on_done(ExecStatus::Aborted);
      return;
    }
    throw std::logic_error("Memory: unknown allocation");
  }
  it->second.recency = ++touch_seq_;
  if (it->second.write_in_service != 0 || !it->second.write_queue.empty()) {
    it->second.read_queue.push_back({mb, std::move(on_done)});
    return;
  }
  start_read(id, mb, std::move(on_done));
}

void Memory::start_read(AllocId id, double mb, CompletionFn cb) {
  auto& a = allocs_.at(id);
  auto cb_holder = std::make_shared<CompletionFn>(std::move(cb));
  auto exec_holder = std::make_shared<ExecId>(0);
  ExecId exec = cpu_.submit(
      mb / speed_mbps_, ExecKind::MemRead,
      [this, id, cb_holder, exec_holder](ExecStatus s) {
        auto it = allocs_.find(id);
        if (it != allocs_.end()) {
          it->second.reads_in_service.erase(*exec_holder);
          auto& paused = it->second.reads_paused;
          paused.erase(std::remove(paused.begin(), paused.end(), *exec_holder),
                       paused.end());
        }
        if (*cb_holder) (*cb_holder)(s);
      });
  *exec_holder = exec;
  a.reads_in_service.insert(exec);
}

void Memory::evict(AllocId id, bool notify) {
  auto it = allocs_.find(id);
  if (it == allocs_.end()) return;
  Allocation a = std::move(it->second);
  allocs_.erase(it);
  used_mb_ -= a.size_mb;

  // Aborting the execs delivers the eviction error to each read's owner.
  for (ExecId exec : a.reads_in_service) cpu_.abort(exec);
  if (a.write_in_service != 0) {
    CompletionFn cb = std::move(a.write_cb);
    cpu_.abort(a.write_in_service);
    if (cb) cb(ExecStatus::Aborted);
  }
  for (auto& op : a.write_queue) {
    if (op.on_done) op.on_done(ExecStatus::Aborted);
  }
  for (auto& op : a.read_queue) {
    if (op.on_done) op.on_done(ExecStatus::Aborted);
  }
  if (notify) {
    for (auto& sub : a.subscribers) {
      if (sub) sub();
    }
    if (eviction_hook) eviction_hook(id);
  }
}

}  // namespace faasim
