#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "faasim/random.hpp"

namespace faasim {

/// One serverless invocation request.
struct Event {
  int class_id = 0;
  int seq = 0;
  double arrival_s = 0.0;   // t^k_i at the controller
  double demand_s = 0.0;    // ideal CPU-seconds
};

enum class DemandModel { Deterministic, Exponential };

struct ScenarioConfig {
  int num_workers = 10;
  int cores = 16;
  double worker_memory_mb = 48000.0;
  int num_classes = 10;
  double ramp_seconds = 20.0;       // T
  double lambda_max = 80.0;         // peak per-class rate, events/second
  double memory_mbps = 12800.0;
  double disk_mbps = 711.0;
  double network_mbps = 1135.0;
  double demand_s = 0.2;            // ideal execution time p
  DemandModel demand_model = DemandModel::Deterministic;
  double image_mb = 290.0;
  double runtime_mb = 140.0;
  double code_mb = 1.0;
  double beta_s = 0.0;              // synchronization penalty scale; 0 = off
  double message_kb = 1.0;
  std::uint64_t seed = 1;

  void validate() const;
};

/// Per-class arrival rate of the sawtooth scenario:
/// (ceil(t)/T) * Lambda while 0 <= t <= T, zero afterwards.
double sawtooth_rate(double t, double lambda_max, double ramp_seconds);

/// Execution time under the synchronization-penalty model:
/// p + beta * phi * (1 - phi).
double sync_penalty_execution(double p, double beta, double phi);

/// Arrivals for one class from an inhomogeneous Poisson process with a
/// per-second piecewise-constant rate. The rate function is sampled once
/// per one-second segment; generation restarts at each segment boundary
/// (valid by memorylessness). Demands are drawn from an independent
/// stream.
std::vector<Event> generate_arrivals(int class_id,
                                     const std::function<double(double)>& rate_fn,
                                     double horizon_s, double demand_s,
                                     DemandModel demand_model,
                                     RandomStream arrival_stream,
                                     RandomStream demand_stream);

/// Full scenario workload, merged across classes and ordered by
/// (arrival, class, seq). Byte-identical for identical (config, seed).
std::vector<Event> generate_workload(const ScenarioConfig& cfg);

void write_workload(std::ostream& os, const std::vector<Event>& events);
std::vector<Event> read_workload(std::istream& is);
void write_workload_file(const std::string& path, const std::vector<Event>& events);
std::vector<Event> read_workload_file(const std::string& path);

}  // namespace faasim
