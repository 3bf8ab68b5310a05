#include "hpcpm/discovery.h"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <sstream>

namespace hpcpm {

namespace {

int lifecycle_rank(const JobState& s) {
  switch (s.kind()) {
    case JobState::Kind::Pending: return 0;
    case JobState::Kind::Running:
    case JobState::Kind::Suspended: return 1;
    case JobState::Kind::Completing: return 2;
    case JobState::Kind::Completed: return 3;
    case JobState::Kind::Other: return -1;
  }
  return -1;
}

std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + '"';
}

std::string fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  std::string s = buf;
  while (s.back() == '0') s.pop_back();
  if (s.back() == '.') s.pop_back();
  return s;
}

}  // namespace

Projection project_case_traces(const CaseLog& log, JobState::Kind milestone) {
  const int want = lifecycle_rank(milestone);

  // case -> job -> events, in log order (already time-sorted within a case)
  std::map<std::string, std::map<std::string, std::vector<const CaseEvent*>>> grouped;
  for (const auto& e : log.events) grouped[e.case_id][e.job_id].push_back(&e);

  Projection out;
  for (auto& [case_id, jobs] : grouped) {
    Trace trace{case_id, {}};
    for (auto& [job_id, events] : jobs) {
      std::stable_sort(events.begin(), events.end(),
                       [](const CaseEvent* a, const CaseEvent* b) { return a->timestamp < b->timestamp; });
      const auto hit = std::find_if(events.begin(), events.end(),
                                    [&](const CaseEvent* e) { return lifecycle_rank(e->lifecycle) >= want; });
      if (hit == events.end()) {
        ++out.dropped_jobs;
        continue;
      }
      TraceEntry entry{(*hit)->activity, job_id, (*hit)->timestamp, std::nullopt};
      for (const CaseEvent* e : events)
        if (e->lifecycle.kind() == JobState::Kind::Completed) {
          entry.completed = e->timestamp;
          break;
        }
      trace.entries.push_back(std::move(entry));
    }
    if (trace.entries.empty()) continue;
    std::sort(trace.entries.begin(), trace.entries.end(), [](const TraceEntry& a, const TraceEntry& b) {
      if (a.at != b.at) return a.at < b.at;
      return job_id_less(a.job_id, b.job_id);
    });
    out.traces.push_back(std::move(trace));
  }
  return out;
}

void EdgeStats::add(double seconds) {
  durations.push_back(seconds);
  frequency = durations.size();
}

void EdgeStats::recompute() {
  frequency = durations.size();
  if (durations.empty()) {
    mean = median = 0.0;
    return;
  }
  mean = std::accumulate(durations.begin(), durations.end(), 0.0) / double(durations.size());
  std::vector<double> sorted = durations;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  median = n % 2 ? sorted[n / 2] : (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0;
}

Dfg discover_dfg(std::span<const Trace> traces, EdgeDuration mode) {
  Dfg dfg;
  for (const auto& trace : traces) {
    const auto& entries = trace.entries;
    if (entries.empty()) continue;
    ++dfg.start_activities[entries.front().activity];
    ++dfg.end_activities[entries.back().activity];
    for (std::size_t i = 0; i < entries.size(); ++i) {
      ++dfg.activities[entries[i].activity];
      if (i + 1 == entries.size()) break;
      const auto& a = entries[i];
      const auto& b = entries[i + 1];
      double d = double((b.at - a.at).count());
      if (mode == EdgeDuration::CompletionToStart && a.completed)
        d = std::max(0.0, double((b.at - *a.completed).count()));
      dfg.edges[{a.activity, b.activity}].add(d);
    }
  }
  for (auto& [_, stats] : dfg.edges) stats.recompute();
  return dfg;
}

Dfg merge(const Dfg& a, const Dfg& b) {
  Dfg out = a;
  for (const auto& [k, v] : b.activities) out.activities[k] += v;
  for (const auto& [k, v] : b.start_activities) out.start_activities[k] += v;
  for (const auto& [k, v] : b.end_activities) out.end_activities[k] += v;
  for (const auto& [k, v] : b.edges) {
    auto& dst = out.edges[k].durations;
    dst.insert(dst.end(), v.durations.begin(), v.durations.end());
  }
  for (auto& [_, stats] : out.edges) stats.recompute();
  return out;
}

Dfg filter_edges(const Dfg& dfg, std::size_t min_frequency) {
  Dfg out = dfg;
  std::erase_if(out.edges, [&](const auto& kv) { return kv.second.frequency < min_frequency; });
  return out;
}

bool ParallelRelation::contains(const std::string& a, const std::string& b) const {
  return pairs.contains(a < b ? ActivityPair{a, b} : ActivityPair{b, a});
}

ParallelRelation detect_parallel(const Dfg& dfg) {
  ParallelRelation out;
  for (const auto& [edge, _] : dfg.edges) {
    const auto& [a, b] = edge;
    if (a < b && dfg.edges.contains({b, a})) out.pairs.emplace(a, b);
  }
  return out;
}

std::string export_dot(const Dfg& dfg, const ParallelRelation& parallel, const DotOptions& options) {
  if (dfg.empty() && dfg.edges.empty()) return "digraph " + options.graph_name + " { }\n";

  double max_mean = 0.0;
  for (const auto& [_, s] : dfg.edges) max_mean = std::max(max_mean, s.mean);

  std::ostringstream out;
  out << "digraph " << options.graph_name << " {\n";
  out << "  rankdir=LR;\n";
  out << "  node [shape=box];\n";
  if (options.show_start_end) {
    out << "  \"__start__\" [shape=circle, label=\"start\"];\n";
    out << "  \"__end__\" [shape=doublecircle, label=\"end\"];\n";
  }
  for (const auto& [name, freq] : dfg.activities)
    out << "  " << quote(name) << " [label=" << quote(name + " (" + std::to_string(freq) + ")")
        << "];\n";
  if (options.show_start_end)
    for (const auto& [name, n] : dfg.start_activities)
      out << "  \"__start__\" -> " << quote(name) << " [label=\"" << n << "\"];\n";
  for (const auto& [edge, s] : dfg.edges) {
    const auto& [a, b] = edge;
    const std::string label = std::to_string(s.frequency) + " / " + humanize_seconds(s.mean) +
                              " / " + humanize_seconds(s.median);
    const double width = max_mean > 0.0 ? 1.0 + 4.0 * s.mean / max_mean : 1.0;
    out << "  " << quote(a) << " -> " << quote(b) << " [label=" << quote(label)
        << ", penwidth=" << fixed2(width);
    if (parallel.contains(a, b)) out << ", style=dashed";
    out << "];\n";
  }
  if (options.show_start_end)
    for (const auto& [name, n] : dfg.end_activities)
      out << "  " << quote(name) << " -> \"__end__\" [label=\"" << n << "\"];\n";
  out << "}\n";
  return out.str();
}

std::string edge_stats_csv(const Dfg& dfg) {
  std::string out = "from,to,frequency,mean_s,median_s\n";
  for (const auto& [edge, s] : dfg.edges)
    out += csv_escape(edge.first) + ',' + csv_escape(edge.second) + ',' +
           std::to_string(s.frequency) + ',' + number(s.mean) + ',' + number(s.median) + '\n';
  return out;
}

}  // namespace hpcpm
