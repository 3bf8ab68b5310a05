#pragma once

// Case-annotated event logs: CSV persistence and summary statistics.

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hpcpm/observer.h"

namespace hpcpm {

struct CaseEvent {
  std::string case_id;
  std::string activity;
  JobState lifecycle;
  EventKind kind = EventKind::Created;
  Timestamp timestamp{};
  std::string job_id;
  std::string account;
  std::string group;
  std::string dependency_raw;

  JobEvent to_job_event() const;
  friend bool operator==(const CaseEvent&, const CaseEvent&) = default;
};

/// Sorted by (case_id, timestamp, job_id).
struct CaseLog {
  std::vector<CaseEvent> events;

  std::vector<JobEvent> job_events() const;
  friend bool operator==(const CaseLog&, const CaseLog&) = default;
};

/// Orders events by (case_id, timestamp, job_id); stable for equal keys.
void sort_case_log(CaseLog& log);

inline constexpr std::string_view kCsvHeader =
    "case_id,activity,lifecycle,event_kind,timestamp,job_id,account,group,dependency_raw";

/// Returns the number of data rows written. Throws IoFailure.
std::size_t write_csv(const CaseLog& log, std::ostream& out);
std::size_t write_csv(const CaseLog& log, const std::string& path);

/// Throws SchemaMismatch, BadTimestamp, IoFailure.
CaseLog read_csv(std::istream& in);
CaseLog read_csv(const std::string& path);

/// Raw observer output: same schema with an empty case_id column.
std::size_t write_events_csv(std::span<const JobEvent> events, std::ostream& out);
std::vector<JobEvent> read_events_csv(std::istream& in);

/// Quotes a field when it holds a comma, quote, CR or LF.
std::string csv_escape(std::string_view field);

struct LogStats {
  std::size_t num_events = 0;
  std::size_t num_unique_jobs = 0;
  std::size_t num_accounts = 0;
  double pct_accounts_explicit = 0.0;  // fraction in [0, 1]
  double pct_jobs_explicit = 0.0;      // fraction in [0, 1]
  std::optional<std::pair<Timestamp, Timestamp>> window;
};

/// A job counts as explicit when its first dependency is non-empty; an
/// account counts when it owns at least one such job.
LogStats compute_stats(const CaseLog& log, const std::map<std::string, DependencySpec>& first_deps);

/// Two-column table with percentages to two decimals. CPU and RAM averages
/// are not available from queue snapshots and are not reported.
std::string render_stats(const LogStats& stats);

}  // namespace hpcpm
