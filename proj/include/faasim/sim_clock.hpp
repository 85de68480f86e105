#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <utility>

namespace faasim {

using SimTime = double;

/// Deterministic discrete-event clock. Events scheduled at the same
/// timestamp fire in scheduling order (ties broken by a monotonically
/// increasing sequence number).
class SimClock {
 public:
  using Callback = std::function<void()>;

  struct Handle {
    SimTime t = 0.0;
    std::uint64_t seq = 0;
    bool valid() const { return seq != 0; }
  };

  SimTime now() const { return now_; }

  Handle schedule_at(SimTime t, Callback cb);
  Handle schedule_after(SimTime dt, Callback cb) {
    return schedule_at(now_ + dt, std::move(cb));
  }

  /// Cancelling an already-fired or unknown handle is a no-op.
  void cancel(Handle h);

  /// Runs the next pending event. Returns false when the queue is empty.
  bool step();

  /// Drains the queue.
  void run();

  /// Runs events scheduled up to and including time t, then advances the
  /// clock to t.
  void run_until(SimTime t);

  std::size_t pending() const { return queue_.size(); }

 private:
  struct Key {
    SimTime t;
    std::uint64_t seq;
    bool operator<(const Key& o) const {
      return t < o.t || (t == o.t && seq < o.seq);
    }
  };

  SimTime now_ = 0.0;
  std::uint64_t next_seq_ = 1;
  std::map<Key, Callback> queue_;
};

}  // namespace faasim
