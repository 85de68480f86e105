#include "faasim/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace faasim {

namespace {

struct Window {
  double first = std::numeric_limits<double>::infinity();
  double last = -std::numeric_limits<double>::infinity();
  void extend(double lo, double hi) {
    first = std::min(first, lo);
    last = std::max(last, hi);
  }
  double span() const { return last > first ? last - first : 0.0; }
};

}  // namespace

std::pair<double, double> eval_instance_objectives(
    const std::vector<SojournRecord>& trace) {
  std::map<std::uint64_t, Window> windows;
  double c2 = 0.0;
  for (const auto& r : trace) {
    if (r.instance == 0) {
      throw std::runtime_error("eval_instance_objectives: incomplete trace");
    }
    windows[r.instance].extend(r.arrival_s, r.arrival_s + r.sojourn_s());
    c2 += r.sojourn_s();
  }
  double c1 = 0.0;
  for (const auto& [id, w] : windows) c1 += w.span();
  return {c1, c2};
}

std::pair<double, double> eval_worker_objectives(
    const std::vector<SojournRecord>& trace, double worker_setup_s) {
  std::map<int, Window> windows;
  double c2 = 0.0;
  for (const auto& r : trace) {
    // N_w(t) covers an instance from the end of its event's waiting to
    // the event's completion.
    double start = r.arrival_s + r.dispatch_delay_s + r.waiting_s;
    double end = r.arrival_s + r.dispatch_delay_s + r.sojourn_s();
    windows[r.worker].extend(start, end);
    c2 += r.sojourn_s();
  }
  double c1 = 0.0;
  for (const auto& [w, win] : windows) c1 += win.span() + worker_setup_s;
  return {c1, c2};
}

ExperimentSummary summarize(const std::vector<SojournRecord>& trace,
                            const std::vector<InstanceRecord>& instances,
                            double worker_setup_s) {
  ExperimentSummary s;
  s.events = static_cast<long>(trace.size());
  double sum_sojourn = 0.0;
  std::map<int, bool> covered;
  for (const auto& r : trace) {
    sum_sojourn += r.sojourn_s();
    covered[r.worker] = true;
    if (r.churn) ++s.churn_evictions;
  }
  s.avg_response_s = trace.empty() ? 0.0 : sum_sojourn / trace.size();
  s.workers_covered = static_cast<int>(covered.size());
  s.total_instances = static_cast<long>(instances.size());

  double busy = 0.0, lifespan = 0.0;
  for (const auto& inst : instances) {
    if (inst.events_served == 0) continue;  // never processed; no lifespan
    busy += inst.busy_s;
    lifespan += inst.last_completion - inst.created_at;
  }
  s.instance_utilization = lifespan > 0 ? busy / lifespan : 0.0;

  auto [ic1, c2] = trace.empty()
                       ? std::pair<double, double>{0.0, 0.0}
                       : eval_instance_objectives(trace);
  auto [wc1, unused] = trace.empty()
                           ? std::pair<double, double>{0.0, 0.0}
                           : eval_worker_objectives(trace, worker_setup_s);
  s.objectives.instance_resource_time = ic1;
  s.objectives.worker_resource_time = wc1;
  s.objectives.summed_sojourn = c2;
  s.objectives.events_completed = s.events;
  s.objectives.efficiency = wc1 > 0 ? s.events / wc1 : 0.0;
  return s;
}

void write_trace_csv(std::ostream& os, const std::vector<SojournRecord>& trace) {
  os << "class,seq,arrival_s,waiting_s,setup_s,execution_s,sojourn_s,"
        "worker,instance,churn\n";
  char buf[256];
  for (const auto& r : trace) {
    std::snprintf(buf, sizeof(buf),
                  "%d,%d,%.9f,%.9f,%.9f,%.9f,%.9f,%d,%llu,%d\n", r.class_id,
                  r.seq, r.arrival_s, r.waiting_s, r.setup_s, r.execution_s,
                  r.sojourn_s(), r.worker,
                  static_cast<unsigned long long>(r.instance),
                  r.churn ? 1 : 0);
    os << buf;
  }
}

std::string trace_csv_string(const std::vector<SojournRecord>& trace) {
  std::ostringstream ss;
  write_trace_csv(ss, trace);
  return ss.str();
}

void write_summary_csv_header(std::ostream& os) {
  os << "scheduler,lambda_max,seed,events,avg_response_s,workers_covered,"
        "total_instances,churn_evictions,instance_utilization,"
        "instance_resource_time_s,worker_resource_time_s,summed_sojourn_s,"
        "efficiency\n";
}

void write_summary_csv_row(std::ostream& os, const ExperimentSummary& s) {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "%s,%g,%llu,%ld,%.9f,%d,%ld,%ld,%.9f,%.9f,%.9f,%.9f,%.9f\n",
                s.scheduler.c_str(), s.lambda_max,
                static_cast<unsigned long long>(s.seed), s.events,
                s.avg_response_s, s.workers_covered, s.total_instances,
                s.churn_evictions, s.instance_utilization,
                s.objectives.instance_resource_time,
                s.objectives.worker_resource_time,
                s.objectives.summed_sojourn, s.objectives.efficiency);
  os << buf;
}

std::string summary_json(const ExperimentSummary& s) {
  nlohmann::json j;
  j["scheduler"] = s.scheduler;
  j["lambda_max"] = s.lambda_max;
  j["seed"] = s.seed;
  j["events"] = s.events;
  j["avg_response_s"] = s.avg_response_s;
  j["workers_covered"] = s.workers_covered;
  j["total_instances"] = s.total_instances;
  j["churn_evictions"] = s.churn_evictions;
  j["instance_utilization"] = s.instance_utilization;
  j["instance_resource_time_s"] = s.objectives.instance_resource_time;
  j["worker_resource_time_s"] = s.objectives.worker_resource_time;
  j["summed_sojourn_s"] = s.objectives.summed_sojourn;
  j["efficiency"] = s.objectives.efficiency;
  return j.dump(2);
}

}  // namespace faasim
