#pragma once

// Directly-follows graph discovery with frequency and duration annotation.

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hpcpm/eventlog.h"

namespace hpcpm {

struct TraceEntry {
  std::string activity;
  std::string job_id;
  Timestamp at{};                       // milestone time
  std::optional<Timestamp> completed;   // first Completed event, if any
};

struct Trace {
  std::string case_id;
  std::vector<TraceEntry> entries;
};

struct Projection {
  std::vector<Trace> traces;
  std::size_t dropped_jobs = 0;  // never reached the milestone
};

/// One entry per job: the first event at or after `milestone` in lifecycle
/// order (Pending < Running < Completing < Completed). Entries are sorted by
/// time, then job id. Cases without any entry produce no trace.
Projection project_case_traces(const CaseLog& log,
                               JobState::Kind milestone = JobState::Kind::Running);

enum class EdgeDuration {
  StartToStart,       // successor milestone - predecessor milestone
  CompletionToStart,  // successor milestone - predecessor completion, floored at 0
};

struct EdgeStats {
  std::size_t frequency = 0;
  std::vector<double> durations;  // seconds
  double mean = 0.0;
  double median = 0.0;

  void add(double seconds);
  void recompute();
};

using ActivityPair = std::pair<std::string, std::string>;

struct Dfg {
  std::map<std::string, std::size_t> activities;
  std::map<ActivityPair, EdgeStats> edges;
  std::map<std::string, std::size_t> start_activities;
  std::map<std::string, std::size_t> end_activities;

  bool empty() const { return activities.empty(); }
};

Dfg discover_dfg(std::span<const Trace> traces,
                 EdgeDuration mode = EdgeDuration::StartToStart);

/// Pointwise frequency sum and duration concatenation.
Dfg merge(const Dfg& a, const Dfg& b);

/// Drops edges below `min_frequency`; nodes and start/end counts are kept.
Dfg filter_edges(const Dfg& dfg, std::size_t min_frequency);

/// Unordered pairs stored with first < second.
struct ParallelRelation {
  std::set<ActivityPair> pairs;

  bool contains(const std::string& a, const std::string& b) const;
};

/// (a, b) with a != b such that both a->b and b->a occur.
ParallelRelation detect_parallel(const Dfg& dfg);

struct DotOptions {
  std::string graph_name = "dfg";
  bool show_start_end = true;
};

/// Deterministic DOT. Nodes read "name (freq)", edges "freq / mean / median";
/// pen width grows with mean duration. Parallel pairs are drawn dashed.
std::string export_dot(const Dfg& dfg, const ParallelRelation& parallel,
                       const DotOptions& options = {});

/// from,to,frequency,mean_s,median_s
std::string edge_stats_csv(const Dfg& dfg);

}  // namespace hpcpm
