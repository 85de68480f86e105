#include "faasim/sim_clock.hpp"

#include <stdexcept>

namespace faasim {

SimClock::Handle SimClock::schedule_at(SimTime t, Callback cb) {
  if (t < now_) {
    // Scheduling in the past would break time monotonicity; clamp tiny
    // negative offsets from float noise, reject anything real.
    if (now_ - t > 1e-9) {
      throw std::logic_error("SimClock: scheduling into the past");
    }
    t = now_;
  }
  Key key{t, next_seq_++};
  queue_.emplace(key, std::move(cb));
  return Handle{key.t, key.seq};
}

void SimClock::cancel(Handle h) {
  if (!h.valid()) return;
  queue_.erase(Key{h.t, h.seq});
}

bool SimClock::step() {
  if (queue_.empty()) return false;
  auto it = queue_.begin();
  now_ = it->first.t;
  Callback cb = std::move(it->second);
  queue_.erase(it);
  cb();
  return true;
}

void SimClock::run() {
  while (step()) {
  }
}

void SimClock::run_until(SimTime t) {
  while (!queue_.empty() && queue_.begin()->first.t <= t) {
    step();
  }
  if (t > now_) now_ = t;
}

}  // namespace faasim
