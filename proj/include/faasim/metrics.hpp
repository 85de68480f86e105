#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace faasim {

/// Per-event lineage: waiting W, setup I, execution B, assignment.
struct SojournRecord {
  int class_id = 0;
  int seq = 0;
  double arrival_s = 0.0;     // at the controller
  double dispatch_delay_s = 0.0;  // message transfer, recorded separately
  double waiting_s = 0.0;     // W
  double setup_s = 0.0;       // I
  double execution_s = 0.0;   // B
  int worker = -1;
  std::uint64_t instance = 0;
  bool churn = false;  // creating this event's instance evicted another

  double sojourn_s() const { return waiting_s + setup_s + execution_s; }
  double completion_s() const {
    return arrival_s + dispatch_delay_s + sojourn_s();
  }
};

/// Lifecycle summary of one instance, for the post-hoc metrics.
struct InstanceRecord {
  std::uint64_t id = 0;
  int class_id = 0;
  int worker = -1;
  double created_at = 0.0;       // creation request time
  double last_completion = 0.0;  // last event completion, 0 if none
  double busy_s = 0.0;           // sum of executed B
  int events_served = 0;
};

struct ObjectiveResult {
  double instance_resource_time = 0.0;  // C_1 over worker-instances
  double worker_resource_time = 0.0;    // C_1 over workers (+ t_W each)
  double summed_sojourn = 0.0;          // C_2
  long events_completed = 0;            // P
  double efficiency = 0.0;              // E = P / C (worker resource time)
};

struct ExperimentSummary {
  std::string scheduler;
  double lambda_max = 0.0;
  std::uint64_t seed = 0;
  long events = 0;
  double avg_response_s = 0.0;
  int workers_covered = 0;
  long total_instances = 0;   // creations, including churn re-creations
  long churn_evictions = 0;
  double instance_utilization = 0.0;
  ObjectiveResult objectives;
};

/// C_1 per instance (first assigned arrival to last completion) and C_2
/// (summed sojourns). Requires a complete trace.
std::pair<double, double> eval_instance_objectives(
    const std::vector<SojournRecord>& trace);

/// Worker-level C_1: per worker, the span between the first and last
/// instant with a processing instance, plus the worker setup time t_W.
/// Workers that never processed an event contribute zero.
std::pair<double, double> eval_worker_objectives(
    const std::vector<SojournRecord>& trace, double worker_setup_s);

ExperimentSummary summarize(const std::vector<SojournRecord>& trace,
                            const std::vector<InstanceRecord>& instances,
                            double worker_setup_s);

void write_trace_csv(std::ostream& os, const std::vector<SojournRecord>& trace);
std::string trace_csv_string(const std::vector<SojournRecord>& trace);

void write_summary_csv_header(std::ostream& os);
void write_summary_csv_row(std::ostream& os, const ExperimentSummary& s);
std::string summary_json(const ExperimentSummary& s);

}  // namespace faasim
