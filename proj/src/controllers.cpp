#include "faasim/controllers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace faasim {

std::vector<WorkerLoadView> Controller::load_views() const {
  std::vector<WorkerLoadView> views;
  views.reserve(workers_.size());
  for (std::size_t i = 0; i < workers_.size(); ++i) {
    views.push_back({static_cast<int>(i), workers_[i]->queued(),
                     workers_[i]->active()});
  }
  return views;
}

// ---------------------------------------------------------------------------

OpenWhiskController::OpenWhiskController(SimClock& clock,
                                         std::vector<WorkerBase*> workers,
                                         int num_classes, int busy_alpha,
                                         RandomStream fallback)
    : Controller(clock, std::move(workers)), busy_alpha_(busy_alpha),
      fallback_(fallback) {
  for (int k = 0; k < num_classes; ++k) {
    class_hashes_.push_back(seed_for(0, "function:" + std::to_string(k)));
  }
}

int OpenWhiskController::pick_worker(const Event& e) {
  auto views = load_views();
  return ow_select_host(class_hashes_.at(e.class_id), views, busy_alpha_,
                        fallback_);
}

// ---------------------------------------------------------------------------

int BinPackController::pick_worker(const Event&) {
  auto choice = binpack_select(policy_, load_views(), capacity_, cursor_);
  if (policy_ == BinPackPolicy::NextFit) cursor_ = choice.worker;
  return choice.worker;
}

// ---------------------------------------------------------------------------

NoncoopController::NoncoopController(SimClock& clock,
                                     std::vector<WorkerBase*> workers,
                                     int num_classes, int cores,
                                     double window_s, double epsilon,
                                     int round_cap, RandomStream dispatch)
    : Controller(clock, std::move(workers)), cores_(cores),
      window_s_(window_s), epsilon_(epsilon), round_cap_(round_cap),
      dispatch_(dispatch) {
  for (int k = 0; k < num_classes; ++k) {
    estimators_.emplace_back(k, window_s, 0.0);
  }
  worker_completions_.assign(workers_.size(), WindowedSamples(window_s));
  busy_snapshots_.resize(workers_.size());
  fractions_.assign(num_classes, {});
}

void NoncoopController::on_arrival(const Event& e) {
  estimators_[e.class_id].record_arrival(clock_.now());
}

void NoncoopController::on_completed(const SojournRecord& r) {
  estimators_[r.class_id].record_execution(clock_.now(), r.execution_s);
  worker_completions_[r.worker].record(clock_.now(), 1.0);
}

void NoncoopController::on_tick() {
  double now = clock_.now();
  // Trailing-window busy time per worker from integral snapshots.
  std::vector<double> busy_in_window(workers_.size(), 0.0);
  for (std::size_t i = 0; i < workers_.size(); ++i) {
    auto& snaps = busy_snapshots_[i];
    double integral = workers_[i]->busy_integral();
    snaps.emplace_back(now, integral);
    while (snaps.size() > 1 && snaps.front().first < now - window_s_) {
      snaps.pop_front();
    }
    busy_in_window[i] = integral - snaps.front().second;
  }

  // Mean execution time across classes backs the bootstrap rate of
  // still-unmeasured machines.
  double exec_sum = 0.0;
  int exec_count = 0;
  std::vector<RateEstimate> ests;
  for (auto& est : estimators_) {
    auto e = est.estimate(now);
    ests.push_back(e);
    if (e.has_mu) {
      exec_sum += e.sample_count / e.mu_hat;
      exec_count += e.sample_count;
    }
  }
  if (exec_count == 0) return;  // nothing measured yet; keep dispatch uniform
  double mean_exec = exec_sum / exec_count;
  double bootstrap_mu = cores_ / mean_exec;

  GameState state;
  state.epsilon = epsilon_;
  state.max_rounds = round_cap_;
  std::vector<int> player_class;
  for (std::size_t k = 0; k < ests.size(); ++k) {
    if (!ests[k].has_lambda || ests[k].lambda_hat <= 0) continue;
    player_class.push_back(static_cast<int>(k));
    state.player_rates.push_back(ests[k].lambda_hat);
    state.fractions.push_back(fractions_[k]);
  }
  if (state.player_rates.empty()) return;
  for (std::size_t i = 0; i < workers_.size(); ++i) {
    double completions = worker_completions_[i].sum(now);
    double mu = (completions > 0 && busy_in_window[i] > 0)
                    ? completions / busy_in_window[i]
                    : bootstrap_mu;
    state.machine_rates.push_back(mu);
  }

  auto result = play_game(std::move(state));
  last_rounds_ = result.rounds;
  for (std::size_t p = 0; p < player_class.size(); ++p) {
    fractions_[player_class[p]] = result.fractions[p];
  }
}

int NoncoopController::pick_worker(const Event& e) {
  const auto& f = fractions_[e.class_id];
  if (f.empty()) {
    return static_cast<int>(dispatch_.uniform_int(workers_.size()));
  }
  double u = dispatch_.uniform();
  double acc = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    acc += f[i];
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(f.size()) - 1;
}

// ---------------------------------------------------------------------------

NoahController::NoahController(SimClock& clock,
                               std::vector<WorkerBase*> workers,
                               const std::vector<ClassSpec>& classes,
                               double window_s, double bootstrap_setup_s,
                               int per_worker_cap, int pool_cap,
                               int bootstrap_allocs)
    : Controller(clock, std::move(workers)), classes_(classes),
      alloc_(static_cast<int>(classes.size()),
             static_cast<int>(workers_.size())),
      per_worker_cap_(per_worker_cap), pool_cap_(pool_cap),
      bootstrap_allocs_(bootstrap_allocs) {
  for (const auto& c : classes_) {
    estimators_.emplace_back(c.class_id, window_s, bootstrap_setup_s);
  }
  last_targets_.assign(classes_.size(), 1);
}

void NoahController::on_arrival(const Event& e) {
  estimators_[e.class_id].record_arrival(clock_.now());
}

void NoahController::on_completed(const SojournRecord& r) {
  estimators_[r.class_id].record_execution(clock_.now(), r.execution_s);
  // The invoker logs each event's setup time; the windowed mean backs
  // the queue-or-launch decision.
  estimators_[r.class_id].record_setup(clock_.now(), r.setup_s);
}

void NoahController::record_setup(int cls, double setup_s) {
  estimators_[cls].record_setup(clock_.now(), setup_s);
}

double NoahController::mu_hat(int cls) {
  return estimators_[cls].estimate(clock_.now()).mu_hat;
}

double NoahController::mean_setup(int cls) {
  return estimators_[cls].estimate(clock_.now()).mean_setup;
}

void NoahController::on_tick() {
  double now = clock_.now();

  std::vector<int> targets(classes_.size(), 1);
  for (std::size_t k = 0; k < classes_.size(); ++k) {
    auto est = estimators_[k].estimate(now);
    targets[k] = estimate_allocations(est, classes_[k].alpha_s, pool_cap_,
                                      bootstrap_allocs_)
                     .count;
  }
  last_targets_ = targets;
  noah_place_allocations(targets, alloc_, per_worker_cap_);
  if (after_tick_hook) after_tick_hook(alloc_);
}

int NoahController::pick_worker(const Event& e) {
  const int k = e.class_id;
  // A reported free instance wins; lowest worker id breaks ties.
  for (std::size_t w = 0; w < workers_.size(); ++w) {
    if (workers_[w]->free_reports(k) > 0) {
      workers_[w]->consume_free_report(k);
      return static_cast<int>(w);
    }
  }
  int best = -1;
  double best_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t w = 0; w < workers_.size(); ++w) {
    int a = alloc_.at(k, static_cast<int>(w));
    if (a <= 0) continue;
    // Weighted feedback: the class's in-flight events at the worker
    // (queued and executing) against its allocation share.
    int active = workers_[w]->active_of(k) + workers_[w]->queued_of(k);
    double ratio = static_cast<double>(active) / a;
    if (ratio < best_ratio) {
      best_ratio = ratio;
      best = static_cast<int>(w);
    }
  }
  if (best >= 0) return best;
  // No allocation yet (first event before the first tick): bootstrap one.
  for (std::size_t w = 0; w < workers_.size(); ++w) {
    if (alloc_.worker_total(static_cast<int>(w)) < per_worker_cap_) {
      alloc_.add(k, static_cast<int>(w));
      return static_cast<int>(w);
    }
  }
  return 0;
}

}  // namespace faasim
