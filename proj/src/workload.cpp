#include "faasim/workload.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace faasim {

void ScenarioConfig::validate() const {
  if (num_workers < 1 || cores < 1 || num_classes < 1) {
    throw std::invalid_argument("scenario: counts must be >= 1");
  }
  if (lambda_max < 0) throw std::invalid_argument("scenario: lambda_max < 0");
  if (ramp_seconds <= 0) throw std::invalid_argument("scenario: ramp must be > 0");
  if (demand_s <= 0) throw std::invalid_argument("scenario: demand must be > 0");
  if (worker_memory_mb <= 0 || memory_mbps <= 0 || disk_mbps <= 0 ||
      network_mbps <= 0) {
    throw std::invalid_argument("scenario: sizes and speeds must be > 0");
  }
}

double sawtooth_rate(double t, double lambda_max, double ramp_seconds) {
  if (t < 0) throw std::invalid_argument("sawtooth_rate: negative time");
  if (t > ramp_seconds) return 0.0;
  return std::ceil(t) / ramp_seconds * lambda_max;
}

double sync_penalty_execution(double p, double beta, double phi) {
  if (phi < 0 || phi > 1) throw std::invalid_argument("sync_penalty: phi out of [0,1]");
  if (beta < 0) throw std::invalid_argument("sync_penalty: negative beta");
  return p + beta * phi * (1.0 - phi);
}

std::vector<Event> generate_arrivals(int class_id,
                                     const std::function<double(double)>& rate_fn,
                                     double horizon_s, double demand_s,
                                     DemandModel demand_model,
                                     RandomStream arrival_stream,
                                     RandomStream demand_stream) {
  std::vector<Event> events;
  int seq = 0;
  for (double seg_start = 0.0; seg_start < horizon_s; seg_start += 1.0) {
    double seg_end = std::min(seg_start + 1.0, horizon_s);
    // Sample the segment's constant rate at its midpoint.
    double rate = rate_fn(0.5 * (seg_start + seg_end));
    if (rate <= 0.0) continue;
    double t = seg_start;
    while (true) {
      t += arrival_stream.exponential(rate);
      if (t >= seg_end) break;
      Event e;
      e.class_id = class_id;
      e.seq = seq++;
      e.arrival_s = t;
      e.demand_s = demand_model == DemandModel::Exponential
                       ? demand_stream.exponential(1.0 / demand_s)
                       : demand_s;
      events.push_back(e);
    }
  }
  return events;
}

std::vector<Event> generate_workload(const ScenarioConfig& cfg) {
  cfg.validate();
  std::vector<Event> all;
  for (int k = 0; k < cfg.num_classes; ++k) {
    auto rate_fn = [&cfg](double t) {
      return sawtooth_rate(t, cfg.lambda_max, cfg.ramp_seconds);
    };
    auto events = generate_arrivals(
        k, rate_fn, cfg.ramp_seconds, cfg.demand_s, cfg.demand_model,
        named_stream(cfg.seed, "arrivals:" + std::to_string(k)),
        named_stream(cfg.seed, "demands:" + std::to_string(k)));
    all.insert(all.end(), events.begin(), events.end());
  }
  std::sort(all.begin(), all.end(), [](const Event& a, const Event& b) {
    if (a.arrival_s != b.arrival_s) return a.arrival_s < b.arrival_s;
    if (a.class_id != b.class_id) return a.class_id < b.class_id;
    return a.seq < b.seq;
  });
  return all;
}

void write_workload(std::ostream& os, const std::vector<Event>& events) {
  os << "class,seq,arrival_s,demand_s\n";
  char buf[128];
  for (const auto& e : events) {
    std::snprintf(buf, sizeof(buf), "%d,%d,%.9f,%.9f\n", e.class_id, e.seq,
                  e.arrival_s, e.demand_s);
    os << buf;
  }
}

std::vector<Event> read_workload(std::istream& is) {
  std::vector<Event> events;
  std::string line;
  if (!std::getline(is, line)) return events;
  if (line != "class,seq,arrival_s,demand_s") {
    throw std::runtime_error("workload file: unexpected header: " + line);
  }
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    Event e;
    char c1, c2, c3;
    std::istringstream ls(line);
    if (!(ls >> e.class_id >> c1 >> e.seq >> c2 >> e.arrival_s >> c3 >>
          e.demand_s) ||
        c1 != ',' || c2 != ',' || c3 != ',') {
      throw std::runtime_error("workload file: bad record: " + line);
    }
    events.push_back(e);
  }
  return events;
}

void write_workload_file(const std::string& path,
                         const std::vector<Event>& events) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  write_workload(os, events);
}

std::vector<Event> read_workload_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open workload file: " + path);
  return read_workload(is);
}

}  // namespace faasim
