#pragma once

// Snapshot diffing: turns a sequence of queue observations into job events.

#include <atomic>
#include <chrono>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hpcpm/snapshot.h"

namespace hpcpm {

enum class EventKind { Created, StateChanged, SyntheticCompleted };

std::string to_string(EventKind kind);
std::optional<EventKind> event_kind_from_string(std::string_view s);

/// Placed in JobEvent::dependency_raw when a job is first seen past Pending,
/// i.e. after its dependency column has already been cleared.
inline constexpr std::string_view kLateDependency = "(late)";

struct JobEvent {
  std::string job_id;
  std::string account;
  std::string group;
  std::string activity;
  JobState state;
  std::string dependency_raw;
  EventKind kind = EventKind::Created;
  Timestamp timestamp{};

  friend bool operator==(const JobEvent&, const JobEvent&) = default;
};

struct TrackedJob {
  JobState state;
  DependencySpec first_dependency;  // captured on first sight, never updated
  std::string account;
  std::string group;
  std::string activity;
  Timestamp first_seen_at{};
  Timestamp last_seen_at{};
};

struct ObserverState {
  std::map<std::string, TrackedJob> jobs;
  std::vector<std::string> first_seen_order;

  std::map<std::string, DependencySpec> first_dependencies() const;
};

struct DiffResult {
  std::vector<JobEvent> events;
  ObserverState state;
};

/// New job -> Created; known job with a different state -> StateChanged;
/// unchanged -> nothing. Throws InconsistentSnapshot if the rows disagree on
/// their observation time.
DiffResult diff_snapshot(ObserverState state, std::span<const JobRow> rows);

/// Tracked jobs missing from `rows` and not yet Completed get a
/// SyntheticCompleted event and are marked Completed. Jobs are visited in
/// first-seen order.
DiffResult finalize_vanished(ObserverState state, std::span<const JobRow> rows,
                             Timestamp observed_at);

/// First dependency per job, recovered from an event stream: the
/// dependency_raw of each job's Created event ("(late)" counts as none).
std::map<std::string, DependencySpec> first_dependencies(std::span<const JobEvent> events);

struct Snapshot {
  Timestamp observed_at{};
  std::string text;
};

class SnapshotSource {
 public:
  virtual ~SnapshotSource() = default;
  /// Next snapshot, or nullopt when exhausted or stopped.
  virtual std::optional<Snapshot> next() = 0;
};

/// Files named snapshot_<basic ISO8601>.txt, served in timestamp order.
/// Other files are ignored.
class ReplayDirectorySource : public SnapshotSource {
 public:
  /// Throws SourceFailure if `dir` is not a readable directory.
  explicit ReplayDirectorySource(const std::filesystem::path& dir);

  std::optional<Snapshot> next() override;
  std::size_t size() const { return files_.size(); }

 private:
  std::vector<std::pair<Timestamp, std::filesystem::path>> files_;
  std::size_t pos_ = 0;
};

/// Serves a fixed list; used by tests and by the pipeline subcommand.
class VectorSource : public SnapshotSource {
 public:
  explicit VectorSource(std::vector<Snapshot> snapshots) : snapshots_(std::move(snapshots)) {}
  std::optional<Snapshot> next() override;

 private:
  std::vector<Snapshot> snapshots_;
  std::size_t pos_ = 0;
};

/// Runs a shell command and returns its standard output. Throws
/// SourceFailure on non-zero exit.
using CommandRunner = std::function<std::string(const std::string& command)>;
using Clock = std::function<Timestamp()>;

std::string run_shell_command(const std::string& command);
Timestamp system_now();

inline constexpr std::string_view kDefaultSqueueCommand = R"(squeue -o "%a %i %E %o %t %g")";

/// Polls a command every `interval` until `stop` becomes true.
class LiveCommandSource : public SnapshotSource {
 public:
  LiveCommandSource(std::string command, std::chrono::seconds interval,
                    const std::atomic<bool>& stop, CommandRunner runner = run_shell_command,
                    Clock clock = system_now);

  std::optional<Snapshot> next() override;

 private:
  std::string command_;
  std::chrono::seconds interval_;
  const std::atomic<bool>& stop_;
  CommandRunner runner_;
  Clock clock_;
  bool first_ = true;
};

class EventSink {
 public:
  virtual ~EventSink() = default;
  virtual void append(const JobEvent& event) = 0;
  virtual void flush() {}
};

class VectorEventSink : public EventSink {
 public:
  void append(const JobEvent& event) override { events.push_back(event); }
  std::vector<JobEvent> events;
};

struct ObservationOptions {
  bool synthetic_complete = true;
  /// Receives one message per malformed snapshot line.
  std::function<void(const std::string&)> diagnostics;
};

struct ObservationSummary {
  std::size_t snapshots = 0;
  std::size_t events = 0;
  std::size_t malformed_rows = 0;
  ObserverState state;
};

/// Drains `source`, diffing each snapshot and appending events to `sink` in
/// order. Throws OutOfOrderSnapshot if observation time regresses; source
/// errors propagate after the sink has been flushed.
ObservationSummary run_observation(SnapshotSource& source, EventSink& sink,
                                   const ObservationOptions& options = {});

}  // namespace hpcpm
