#include "faasim/cpu.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <vector>

namespace faasim {

namespace {
// Residual CPU-seconds below this count as zero (float noise from the
// horizon arithmetic, orders of magnitude under any modeled demand).
constexpr double kDoneEps = 1e-12;
}  // namespace

CpuSet::CpuSet(SimClock& clock, int cores) : clock_(clock), cores_(cores) {
  if (cores < 1) throw std::invalid_argument("CpuSet: cores must be >= 1");
}

double CpuSet::current_rate() const {
  if (running_ <= cores_) return 1.0;
  return static_cast<double>(cores_) / running_;
}

void CpuSet::sync_progress() {
  SimTime now = clock_.now();
  double dt = now - last_sync_;
  if (dt > 0.0 && running_ > 0) {
    double rate = current_rate();
    for (auto& [id, e] : execs_) {
      if (!e.running) continue;
      e.remaining = std::max(0.0, e.remaining - dt * rate);
    }
    capacity_integral_ += dt * std::min(cores_, running_);
  }
  last_sync_ = now;
}

void CpuSet::reschedule() {
  if (pending_.valid()) {
    clock_.cancel(pending_);
    pending_ = {};
  }
  if (running_ == 0) return;
  double min_rem = std::numeric_limits<double>::infinity();
  for (const auto& [id, e] : execs_) {
    if (e.running) min_rem = std::min(min_rem, e.remaining);
  }
  pending_ = clock_.schedule_after(min_rem / current_rate(),
                                   [this] { on_completion_event(); });
}

ExecId CpuSet::submit(double demand, ExecKind kind, CompletionFn on_done) {
  if (demand < 0.0) throw std::invalid_argument("CpuSet: negative demand");
  sync_progress();
  ExecId id = next_id_++;
  execs_.emplace(id, Exec{demand, demand, kind, std::move(on_done), true});
  ++running_;
  reschedule();
  return id;
}

void CpuSet::pause(ExecId id) {
  sync_progress();
  auto it = execs_.find(id);
  if (it == execs_.end() || !it->second.running) return;
  it->second.running = false;
  --running_;
  reschedule();
}

void CpuSet::resume(ExecId id) {
  sync_progress();
  auto it = execs_.find(id);
  if (it == execs_.end() || it->second.running) return;
  it->second.running = true;
  ++running_;
  reschedule();
}

void CpuSet::abort(ExecId id) {
  sync_progress();
  auto it = execs_.find(id);
  if (it == execs_.end()) return;
  CompletionFn cb = std::move(it->second.on_done);
  if (it->second.running) --running_;
  completed_work_ += it->second.demand - it->second.remaining;
  execs_.erase(it);
  reschedule();
  if (cb) cb(ExecStatus::Aborted);
}

void CpuSet::on_completion_event() {
  pending_ = {};
  sync_progress();
  std::vector<std::pair<ExecId, CompletionFn>> due;
  for (auto it = execs_.begin(); it != execs_.end();) {
    if (it->second.running && it->second.remaining <= kDoneEps) {
      completed_work_ += it->second.demand;
      due.emplace_back(it->first, std::move(it->second.on_done));
      --running_;
      it = execs_.erase(it);
    } else {
      ++it;
    }
  }
  reschedule();
  for (auto& [id, cb] : due) {
    if (cb) cb(ExecStatus::Completed);
  }
}

double CpuSet::delivered_work() const {
  double dt = clock_.now() - last_sync_;
  double pending_rate = (dt > 0.0 && running_ > 0) ? current_rate() : 0.0;
  double inflight = 0.0;
  for (const auto& [id, e] : execs_) {
    inflight += e.demand - e.remaining;
    if (e.running) inflight += dt * pending_rate;
  }
  return completed_work_ + inflight;
}

double CpuSet::capacity_integral() const {
  double extra = 0.0;
  double dt = clock_.now() - last_sync_;
  if (dt > 0.0 && running_ > 0) extra = dt * std::min(cores_, running_);
  return capacity_integral_ + extra;
}

}  // namespace faasim
