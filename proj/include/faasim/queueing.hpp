#pragma once

#include <cstdint>
#include <deque>
#include <stdexcept>

#include "faasim/sim_clock.hpp"

namespace faasim {

class StabilityError : public std::runtime_error {
 public:
  explicit StabilityError(const std::string& what)
      : std::runtime_error(what) {}
};

/// P(wait > 0) for an M/M/c queue with offered load a = lambda/mu erlangs,
/// via the numerically stable Erlang-B recurrence
///   B(0) = 1,  B(j) = a*B(j-1) / (j + a*B(j-1)),
///   C = B(c) / (1 - (a/c) * (1 - B(c))).
/// Requires 0 <= a < c.
double erlang_c(int servers, double offered_load);

/// Mean response time of an M/M/c queue:
///   C(c, lambda/mu) / (c*mu - lambda) + 1/mu.
double mmc_mean_response(double lambda, double mu, int servers);

struct AllocationEstimate {
  int count = 1;
  bool saturated = false;
  bool bootstrapped = false;
};

/// Running rate estimates for one event class over a sliding window.
struct RateEstimate {
  int class_id = 0;
  double lambda_hat = 0.0;   // arrivals per second
  double mu_hat = 0.0;       // service completions per second (from B only)
  double mean_setup = 0.0;   // mean observed instance-creation setup, seconds
  int sample_count = 0;      // completed executions backing mu_hat
  bool has_lambda = false;
  bool has_mu = false;
};

/// Smallest instance count c_k such that lambda/(c_k*mu) < 1 and the
/// expected M/M/c waiting time stays below alpha, capped at `cap` (total
/// pool concurrency). A class with no samples yet gets the bootstrap count.
AllocationEstimate estimate_allocations(const RateEstimate& est, double alpha,
                                        int cap, int bootstrap = 1);

/// Sliding-window sample collector: values are recorded with their
/// timestamps, and means are computed over the trailing window only.
class WindowedSamples {
 public:
  explicit WindowedSamples(double window_s) : window_s_(window_s) {}

  void record(SimTime t, double value) {
    samples_.push_back({t, value});
    trim(t);
  }

  int count(SimTime now) {
    trim(now);
    return static_cast<int>(samples_.size());
  }

  double sum(SimTime now) {
    trim(now);
    double s = 0;
    for (const auto& e : samples_) s += e.value;
    return s;
  }

  double mean(SimTime now) {
    trim(now);
    if (samples_.empty()) return 0.0;
    return sum(now) / static_cast<double>(samples_.size());
  }

  /// (last - first) timestamp span among retained samples.
  double span(SimTime now) {
    trim(now);
    if (samples_.size() < 2) return 0.0;
    return samples_.back().t - samples_.front().t;
  }

  /// Time from the oldest retained sample to now; a silent tail after
  /// the last sample counts, so rates decay once arrivals stop.
  double elapsed(SimTime now) {
    trim(now);
    if (samples_.empty()) return 0.0;
    return now - samples_.front().t;
  }

 private:
  struct Entry {
    SimTime t;
    double value;
  };
  void trim(SimTime now) {
    while (!samples_.empty() && samples_.front().t < now - window_s_) {
      samples_.pop_front();
    }
  }
  double window_s_;
  std::deque<Entry> samples_;
};

/// Per-class estimator: arrival timestamps feed lambda_hat, completed
/// execution times feed mu_hat, creation setups feed mean_setup.
class ClassEstimator {
 public:
  ClassEstimator(int class_id, double window_s, double bootstrap_setup)
      : class_id_(class_id), arrivals_(window_s), executions_(window_s),
        setups_(window_s), bootstrap_setup_(bootstrap_setup) {}

  void record_arrival(SimTime t) { arrivals_.record(t, 0.0); }
  void record_execution(SimTime t, double busy_s) { executions_.record(t, busy_s); }
  void record_setup(SimTime t, double setup_s) { setups_.record(t, setup_s); }

  RateEstimate estimate(SimTime now);

 private:
  int class_id_;
  WindowedSamples arrivals_;
  WindowedSamples executions_;
  WindowedSamples setups_;
  double bootstrap_setup_;
};

}  // namespace faasim
