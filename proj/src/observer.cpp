#include "hpcpm/observer.h"

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "hpcpm/error.h"

namespace hpcpm {

namespace fs = std::filesystem;

std::string to_string(EventKind kind) {
  switch (kind) {
    case EventKind::Created: return "created";
    case EventKind::StateChanged: return "state_changed";
    case EventKind::SyntheticCompleted: return "synthetic_completed";
  }
  return "created";
}

std::optional<EventKind> event_kind_from_string(std::string_view s) {
  if (s == "created") return EventKind::Created;
  if (s == "state_changed") return EventKind::StateChanged;
  if (s == "synthetic_completed") return EventKind::SyntheticCompleted;
  return std::nullopt;
}

std::map<std::string, DependencySpec> ObserverState::first_dependencies() const {
  std::map<std::string, DependencySpec> out;
  for (const auto& [id, job] : jobs) out.emplace(id, job.first_dependency);
  return out;
}

DiffResult diff_snapshot(ObserverState state, std::span<const JobRow> rows) {
  DiffResult out;
  if (!rows.empty()) {
    const auto t = rows.front().observed_at;
    for (const auto& r : rows)
      if (r.observed_at != t)
        throw InconsistentSnapshot("rows of one snapshot carry different observation times");
  }

  std::set<std::string_view> seen_here;
  for (const auto& row : rows) {
    if (!seen_here.insert(row.job_id).second) continue;

    auto it = state.jobs.find(row.job_id);
    if (it == state.jobs.end()) {
      const bool pending = row.state.kind() == JobState::Kind::Pending;
      TrackedJob job;
      job.state = row.state;
      job.first_dependency = pending ? parse_dependency_spec(row.dependency_raw) : DependencySpec{};
      job.account = row.account;
      job.group = row.group;
      job.activity = normalize_command(row.command_path);
      job.first_seen_at = job.last_seen_at = row.observed_at;

      out.events.push_back({row.job_id, row.account, row.group, job.activity, row.state,
                            pending ? row.dependency_raw : std::string(kLateDependency),
                            EventKind::Created, row.observed_at});
      state.jobs.emplace(row.job_id, std::move(job));
      state.first_seen_order.push_back(row.job_id);
      continue;
    }

    TrackedJob& job = it->second;
    if (job.state != row.state) {
      out.events.push_back({row.job_id, job.account, job.group, job.activity, row.state,
                            row.dependency_raw, EventKind::StateChanged, row.observed_at});
      job.state = row.state;
    }
    job.last_seen_at = row.observed_at;
  }
  out.state = std::move(state);
  return out;
}

DiffResult finalize_vanished(ObserverState state, std::span<const JobRow> rows,
                             Timestamp observed_at) {
  DiffResult out;
  std::set<std::string_view> present;
  for (const auto& r : rows) present.insert(r.job_id);

  for (const auto& id : state.first_seen_order) {
    if (present.contains(id)) continue;
    TrackedJob& job = state.jobs.at(id);
    if (job.state.kind() == JobState::Kind::Completed) continue;
    job.state = JobState::Kind::Completed;
    out.events.push_back({id, job.account, job.group, job.activity, job.state, "(null)",
                          EventKind::SyntheticCompleted, observed_at});
  }
  out.state = std::move(state);
  return out;
}

std::map<std::string, DependencySpec> first_dependencies(std::span<const JobEvent> events) {
  std::map<std::string, DependencySpec> out;
  std::map<std::string, const JobEvent*> earliest;
  for (const auto& e : events) {
    auto& slot = earliest[e.job_id];
    const bool better = !slot || (e.kind == EventKind::Created && slot->kind != EventKind::Created) ||
                        (e.kind == slot->kind && e.timestamp < slot->timestamp);
    if (better) slot = &e;
  }
  for (const auto& [id, e] : earliest) {
    const bool usable = e->kind == EventKind::Created && e->dependency_raw != kLateDependency;
    out.emplace(id, usable ? parse_dependency_spec(e->dependency_raw) : DependencySpec{});
  }
  return out;
}

ReplayDirectorySource::ReplayDirectorySource(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw SourceFailure("not a directory: " + dir.string());
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    if (!entry.is_regular_file()) continue;
    if (auto t = parse_snapshot_filename(entry.path().filename().string()))
      files_.emplace_back(*t, entry.path());
  }
  if (ec) throw SourceFailure("cannot list " + dir.string() + ": " + ec.message());
  std::sort(files_.begin(), files_.end());
}

std::optional<Snapshot> ReplayDirectorySource::next() {
  if (pos_ >= files_.size()) return std::nullopt;
  const auto& [t, path] = files_[pos_++];
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SourceFailure("cannot read " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return Snapshot{t, text.str()};
}

std::optional<Snapshot> VectorSource::next() {
  if (pos_ >= snapshots_.size()) return std::nullopt;
  return snapshots_[pos_++];
}

std::string run_shell_command(const std::string& command) {
  FILE* pipe = ::popen(command.c_str(), "r");
  if (!pipe) throw SourceFailure("cannot start: " + command);
  std::string output;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) output.append(buf.data(), n);
  const int status = ::pclose(pipe);
  if (status != 0)
    throw SourceFailure("command failed (status " + std::to_string(status) + "): " + command);
  return output;
}

Timestamp system_now() {
  return std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
}

LiveCommandSource::LiveCommandSource(std::string command, std::chrono::seconds interval,
                                     const std::atomic<bool>& stop, CommandRunner runner,
                                     Clock clock)
    : command_(std::move(command)),
      interval_(interval),
      stop_(stop),
      runner_(std::move(runner)),
      clock_(std::move(clock)) {}

std::optional<Snapshot> LiveCommandSource::next() {
  if (!first_) {
    const auto deadline = std::chrono::steady_clock::now() + interval_;
    while (!stop_ && std::chrono::steady_clock::now() < deadline)
      std::this_thread::sleep_for(std::chrono::milliseconds(50));
  }
  first_ = false;
  if (stop_) return std::nullopt;
  const Timestamp t = clock_();
  return Snapshot{t, runner_(command_)};
}

ObservationSummary run_observation(SnapshotSource& source, EventSink& sink,
                                   const ObservationOptions& options) {
  ObservationSummary summary;
  std::optional<Timestamp> last;
  try {
    while (auto snapshot = source.next()) {
      if (last && snapshot->observed_at < *last)
        throw OutOfOrderSnapshot("snapshot at " + format_iso8601(snapshot->observed_at) +
                                 " precedes " + format_iso8601(*last));
      last = snapshot->observed_at;
      ++summary.snapshots;

      auto parsed = parse_snapshot(snapshot->text, snapshot->observed_at);
      summary.malformed_rows += parsed.errors.size();
      if (options.diagnostics)
        for (const auto& e : parsed.errors)
          options.diagnostics("snapshot " + format_iso8601(snapshot->observed_at) + " line " +
                              std::to_string(e.line_number) + ": malformed row '" + e.line + "'");

      auto diff = diff_snapshot(std::move(summary.state), parsed.rows);
      for (const auto& e : diff.events) sink.append(e);
      summary.events += diff.events.size();
      summary.state = std::move(diff.state);

      if (options.synthetic_complete) {
        auto done = finalize_vanished(std::move(summary.state), parsed.rows, snapshot->observed_at);
        for (const auto& e : done.events) sink.append(e);
        summary.events += done.events.size();
        summary.state = std::move(done.state);
      }
    }
  } catch (...) {
    sink.flush();
    throw;
  }
  sink.flush();
  return summary;
}

}  // namespace hpcpm
