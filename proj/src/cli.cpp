#include "hpcpm/cli.h"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include "hpcpm/correlation.h"
#include "hpcpm/discovery.h"
#include "hpcpm/error.h"
#include "hpcpm/eventlog.h"
#include "hpcpm/observer.h"
#include "hpcpm/simulator.h"

namespace hpcpm::cli {

namespace fs = std::filesystem;

namespace {

struct ObserveArgs {
  std::string replay_dir;
  bool live = false;
  int interval = 30;
  std::string squeue_command;
  bool no_synthetic_complete = false;
};

struct CorrelateArgs {
  std::string strategy = "explicit";
  bool hash_case_ids = false;
};

struct DiscoverArgs {
  std::string milestone = "running";
  std::string edge_duration = "start-start";
  std::size_t min_edge_freq = 1;
  std::string account;
  std::string stats_out;
};

// "-" means the provided stream.
class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) {
    if (path.empty() || path == "-") {
      stream_ = &fallback;
    } else {
      file_.open(path, std::ios::binary);
      if (!file_) throw IoFailure("cannot open " + path + " for writing");
      stream_ = &file_;
    }
  }
  std::ostream& stream() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot open " + path);
  return in;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) throw IoFailure("cannot write " + path.string());
}

void add_observe_flags(CLI::App* cmd, ObserveArgs& a) {
  auto* replay = cmd->add_option("--replay", a.replay_dir, "Replay snapshot files from DIR");
  auto* live = cmd->add_flag("--live", a.live, "Poll the scheduler");
  replay->excludes(live);
  cmd->add_option("--interval", a.interval, "Polling interval in seconds")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--squeue-cmd", a.squeue_command,
                  "Command producing a snapshot (default: $HPCPM_SQUEUE_CMD or squeue)");
  cmd->add_flag("--no-synthetic-complete", a.no_synthetic_complete,
                "Do not emit completion events for jobs leaving the queue");
}

void add_correlate_flags(CLI::App* cmd, CorrelateArgs& a) {
  cmd->add_option("--strategy", a.strategy, "Case notion")
      ->check(CLI::IsMember({"explicit", "implicit"}));
  cmd->add_flag("--hash-case-ids", a.hash_case_ids, "Digest explicit case ids");
}

void add_discover_flags(CLI::App* cmd, DiscoverArgs& a) {
  cmd->add_option("--milestone", a.milestone, "Lifecycle event anchoring an activity")
      ->check(CLI::IsMember({"pending", "running", "completed"}));
  cmd->add_option("--edge-duration", a.edge_duration, "Arc duration measure")
      ->check(CLI::IsMember({"start-start", "completion-start"}));
  cmd->add_option("--min-edge-freq", a.min_edge_freq, "Hide arcs observed fewer times");
  cmd->add_option("--account", a.account, "Only cases of this account");
  cmd->add_option("--stats-out", a.stats_out, "Write per-arc statistics CSV");
}

std::vector<JobEvent> observe(const ObserveArgs& a, std::ostream& err) {
  std::unique_ptr<SnapshotSource> source;
  if (a.live) {
    std::string command = a.squeue_command;
    if (command.empty())
      if (const char* env = std::getenv("HPCPM_SQUEUE_CMD")) command = env;
    if (command.empty()) command = kDefaultSqueueCommand;
    interrupt_flag() = false;
    source = std::make_unique<LiveCommandSource>(command, std::chrono::seconds{a.interval},
                                                 interrupt_flag());
  } else if (!a.replay_dir.empty()) {
    source = std::make_unique<ReplayDirectorySource>(a.replay_dir);
  } else {
    throw Error("one of --replay DIR or --live is required");
  }

  VectorEventSink sink;
  ObservationOptions options;
  options.synthetic_complete = !a.no_synthetic_complete;
  options.diagnostics = [&err](const std::string& m) { err << "warning: " << m << '\n'; };
  const auto summary = run_observation(*source, sink, options);
  err << "observed " << summary.snapshots << " snapshots, " << summary.events << " events\n";
  return std::move(sink.events);
}

CaseLog correlate(const std::vector<JobEvent>& events, const CorrelateArgs& a, std::ostream& err) {
  std::set<std::string> jobs;
  for (const auto& e : events) jobs.insert(e.job_id);

  CaseAssignment assignment;
  if (a.strategy == "explicit") {
    const auto build = build_dependency_graph(events, first_dependencies(events));
    for (const auto& c : build.cycles)
      err << "warning: dependency " << c.job_ids.front() << " -> " << c.job_ids.back()
          << " closes a cycle; edge dropped\n";
    if (build.graph.edges.empty() && jobs.size() > 1)
      err << "warning: no explicit dependencies observed; every event belongs to a different "
             "case\n";
    assignment = assign_cases_explicit(build.graph, {a.hash_case_ids});
  } else {
    assignment = assign_cases_implicit(events);
    if (assignment.case_count() == 1 && jobs.size() > 1)
      err << "warning: a single account-group; every event belongs to the same case\n";
  }
  return apply_cases(events, assignment);
}

JobState::Kind milestone_kind(const std::string& m) {
  if (m == "pending") return JobState::Kind::Pending;
  if (m == "completed") return JobState::Kind::Completed;
  return JobState::Kind::Running;
}

void discover(CaseLog log, const DiscoverArgs& a, std::ostream& dot_out, std::ostream& err) {
  if (!a.account.empty())
    std::erase_if(log.events, [&](const CaseEvent& e) { return e.account != a.account; });
  const auto projection = project_case_traces(log, milestone_kind(a.milestone));
  if (projection.dropped_jobs > 0)
    err << "warning: " << projection.dropped_jobs << " jobs never reached the " << a.milestone
        << " milestone\n";
  const auto mode = a.edge_duration == "completion-start" ? EdgeDuration::CompletionToStart
                                                          : EdgeDuration::StartToStart;
  const Dfg dfg = filter_edges(discover_dfg(projection.traces, mode), a.min_edge_freq);
  const auto parallel = detect_parallel(dfg);
  dot_out << export_dot(dfg, parallel);
  if (!a.stats_out.empty()) write_file(a.stats_out, edge_stats_csv(dfg));
}

int guarded(std::ostream& err, const std::function<void()>& body) {
  try {
    body();
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace

std::atomic<bool>& interrupt_flag() {
  static std::atomic<bool> flag{false};
  return flag;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Process mining over HPC scheduler queue observations", "hpcpm"};
  app.require_subcommand(1);

  ObserveArgs observe_args;
  std::string observe_out;
  auto* observe_cmd = app.add_subcommand("observe", "Extract job events from queue snapshots");
  add_observe_flags(observe_cmd, observe_args);
  observe_cmd->add_option("-o,--output", observe_out, "Events CSV (default: stdout)");

  CorrelateArgs correlate_args;
  std::string correlate_in, correlate_out;
  auto* correlate_cmd = app.add_subcommand("correlate", "Assign case ids to job events");
  correlate_cmd->add_option("input", correlate_in, "Events CSV")->required();
  add_correlate_flags(correlate_cmd, correlate_args);
  correlate_cmd->add_option("-o,--output", correlate_out, "Case log CSV (default: stdout)");

  DiscoverArgs discover_args;
  std::string discover_in, discover_out;
  auto* discover_cmd = app.add_subcommand("discover", "Discover a directly-follows graph");
  discover_cmd->add_option("input", discover_in, "Case log CSV")->required();
  add_discover_flags(discover_cmd, discover_args);
  discover_cmd->add_option("-o,--output", discover_out, "DOT file (default: stdout)");

  std::string stats_in;
  auto* stats_cmd = app.add_subcommand("stats", "Print event log statistics");
  stats_cmd->add_option("input", stats_in, "Events or case log CSV")->required();

  std::string scenario;
  std::string sim_out;
  std::optional<std::uint64_t> seed;
  auto* simulate_cmd = app.add_subcommand("simulate", "Run a synthetic workflow scenario");
  simulate_cmd->add_option("scenario", scenario, "Bundled scenario name or scenario file")
      ->required();
  simulate_cmd->add_option("-o,--output", sim_out, "Output directory")->required();
  simulate_cmd->add_option("--seed", seed, "Override the scenario seed");

  ObserveArgs pipe_observe;
  CorrelateArgs pipe_correlate;
  DiscoverArgs pipe_discover;
  std::string pipe_events, pipe_cases, pipe_out;
  auto* pipeline_cmd =
      app.add_subcommand("pipeline", "observe, correlate and discover in one run");
  add_observe_flags(pipeline_cmd, pipe_observe);
  add_correlate_flags(pipeline_cmd, pipe_correlate);
  add_discover_flags(pipeline_cmd, pipe_discover);
  pipeline_cmd->add_option("--events-out", pipe_events, "Also write the events CSV");
  pipeline_cmd->add_option("--cases-out", pipe_cases, "Also write the case log CSV");
  pipeline_cmd->add_option("-o,--output", pipe_out, "DOT file (default: stdout)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  if (*observe_cmd) {
    return guarded(err, [&] {
      const auto events = observe(observe_args, err);
      Output o(observe_out, out);
      write_events_csv(events, o.stream());
    });
  }
  if (*correlate_cmd) {
    return guarded(err, [&] {
      auto in = open_input(correlate_in);
      const auto log = correlate(read_events_csv(in), correlate_args, err);
      Output o(correlate_out, out);
      write_csv(log, o.stream());
    });
  }
  if (*discover_cmd) {
    return guarded(err, [&] {
      auto log = read_csv(discover_in);
      Output o(discover_out, out);
      discover(std::move(log), discover_args, o.stream(), err);
    });
  }
  if (*stats_cmd) {
    return guarded(err, [&] {
      const auto log = read_csv(stats_in);
      const auto events = log.job_events();
      out << render_stats(compute_stats(log, first_dependencies(events)));
    });
  }
  if (*simulate_cmd) {
    return guarded(err, [&] {
      ScenarioSpec spec;
      if (const auto text = bundled_scenario_text(scenario)) spec = load_scenario(*text);
      else if (fs::is_regular_file(scenario)) spec = load_scenario_file(scenario);
      else throw Error("unknown scenario '" + scenario + "'");
      if (seed) spec.seed = *seed;

      const auto sim = simulate(spec);
      fs::create_directories(sim_out);
      for (const auto& snap : sim.snapshots)
        write_file(fs::path(sim_out) / snapshot_filename(snap.observed_at), snap.text);
      write_file(fs::path(sim_out) / "oracle.csv", oracle_transitions_csv(sim.oracle));
      std::string truth = "job_id,true_case,duration_s\n";
      for (const auto& [job, c] : sim.oracle.true_cases)
        truth += csv_escape(job) + ',' + csv_escape(c) + ',' +
                 std::to_string(sim.oracle.stage_durations.at(job)) + '\n';
      write_file(fs::path(sim_out) / "truth.csv", truth);
      write_file(fs::path(sim_out) / "scenario.txt", serialize_scenario(spec));
      err << "wrote " << sim.snapshots.size() << " snapshots to " << sim_out << '\n';
    });
  }
  if (*pipeline_cmd) {
    return guarded(err, [&] {
      const auto events = observe(pipe_observe, err);
      if (!pipe_events.empty()) {
        Output o(pipe_events, out);
        write_events_csv(events, o.stream());
      }
      auto log = correlate(events, pipe_correlate, err);
      if (!pipe_cases.empty()) write_csv(log, pipe_cases);
      Output o(pipe_out, out);
      discover(std::move(log), pipe_discover, o.stream(), err);
    });
  }
  return 0;
}

}  // namespace hpcpm::cli
