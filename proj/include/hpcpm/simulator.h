#pragma once

// Deterministic synthetic scheduler. Executes workflow scenarios, renders the
// queue as squeue snapshots and records the ground truth those snapshots
// were generated from.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hpcpm/observer.h"

namespace hpcpm {

enum class SubmitMode {
  Batch,                  // submitted at t=0 with declared dependencies
  ManualAfterCompletion,  // submitted by hand once the predecessors are gone
};

struct ScenarioJob {
  std::string job_id;
  std::string account;
  std::string group;
  std::string command_path;
  std::int64_t duration = 0;  // seconds in Running
  std::vector<std::string> dependencies;
  SubmitMode mode = SubmitMode::Batch;

  friend bool operator==(const ScenarioJob&, const ScenarioJob&) = default;
};

struct ScenarioSpec {
  std::vector<ScenarioJob> jobs;
  std::uint64_t seed = 0;
  std::int64_t interval = 30;  // seconds between periodic snapshots
  std::optional<std::size_t> max_running;

  friend bool operator==(const ScenarioSpec&, const ScenarioSpec&) = default;
};

/// Time zero of every simulation.
inline constexpr Timestamp kSimulationEpoch{std::chrono::seconds{1670413905}};  // 2022-12-07T11:51:45Z

struct Transition {
  std::string job_id;
  std::optional<JobState> from;  // nullopt: not yet submitted
  std::optional<JobState> to;    // nullopt: left the queue
  Timestamp at{};

  /// The observer event this transition should produce.
  EventKind expected_event() const;
  friend bool operator==(const Transition&, const Transition&) = default;
};

struct Oracle {
  /// Ordered by time; at equal times departures come last and jobs follow
  /// submission order, matching the row order of the rendered snapshots.
  std::vector<Transition> transitions;
  std::map<std::string, std::string> true_cases;  // job_id -> case label
  std::map<std::string, std::int64_t> stage_durations;
};

struct Simulation {
  std::vector<Snapshot> snapshots;
  Oracle oracle;
};

/// Throws ValidationError when a dependency is unknown, forms a cycle, or a
/// batch job depends on a manually submitted one.
void validate_scenario(const ScenarioSpec& spec);

/// Batch jobs are pending from t=0 and become ready one interval (plus a
/// seeded jitter below one interval) after their last dependency leaves the
/// queue. Manual jobs are submitted one interval after their predecessors
/// leave and become ready the same way. A job runs for its duration,
/// completes for one interval and vanishes. Snapshots are taken every
/// interval and at every state change.
Simulation simulate(const ScenarioSpec& spec);

/// Line format:
///   seed=<n>
///   interval=<secs>
///   max_running=<n>        (optional)
///   job <id> account=<a> group=<g> cmd=<path> dur=<secs> deps=<id,id|-> mode=<batch|manual>
/// '#' starts a comment. Throws ParseError or ValidationError.
ScenarioSpec load_scenario(std::string_view text);
ScenarioSpec load_scenario_file(const std::string& path);
std::string serialize_scenario(const ScenarioSpec& spec);

/// fig1_explicit, fig1_manual, two_chains, fig8_parallel
std::vector<std::string> bundled_scenario_names();
std::optional<std::string> bundled_scenario_text(std::string_view name);

/// Renders oracle transitions as CSV: job_id,from,to,timestamp,expected_event
std::string oracle_transitions_csv(const Oracle& oracle);

}  // namespace hpcpm
