#include "hpcpm/simulator.h"

#include <algorithm>
#include <fstream>
#include <limits>
#include <random>
#include <set>
#include <sstream>

#include "hpcpm/error.h"
#include "hpcpm/eventlog.h"

namespace hpcpm {

namespace {

enum class Phase { Unsubmitted, Pending, Running, Completing, Gone };

JobState to_job_state(Phase p) {
  switch (p) {
    case Phase::Pending: return JobState::Kind::Pending;
    case Phase::Running: return JobState::Kind::Running;
    default: return JobState::Kind::Completing;
  }
}

std::optional<JobState> visible_state(Phase p) {
  if (p == Phase::Unsubmitted || p == Phase::Gone) return std::nullopt;
  return to_job_state(p);
}

constexpr std::int64_t kNever = std::numeric_limits<std::int64_t>::max();

struct SimJob {
  const ScenarioJob* spec = nullptr;
  std::size_t index = 0;
  std::vector<std::size_t> deps;
  std::int64_t jitter = 0;

  Phase phase = Phase::Unsubmitted;
  std::int64_t submit = kNever;
  std::int64_t ready = kNever;
  std::int64_t next_change = kNever;  // R -> CG or CG -> gone
  std::int64_t gone = kNever;
  std::vector<std::pair<std::int64_t, Phase>> timeline;
};

struct RawTransition {
  std::size_t job;
  Phase from, to;
  std::int64_t at;
};

std::map<std::string, std::size_t> index_jobs(const ScenarioSpec& spec) {
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < spec.jobs.size(); ++i) {
    const auto& job = spec.jobs[i];
    if (job.job_id.empty()) throw ValidationError("", "empty job id");
    if (!index.emplace(job.job_id, i).second) throw ValidationError(job.job_id, "duplicate job id");
  }
  return index;
}

bool has_whitespace(const std::string& s) {
  return s.find_first_of(" \t\r\n") != std::string::npos;
}

std::string trim_copy(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::int64_t parse_int(std::string_view value, std::size_t line, std::string_view key) {
  std::int64_t v = 0;
  std::istringstream in{std::string(value)};
  if (!(in >> v) || !in.eof()) throw ParseError(line, "bad integer for " + std::string(key));
  return v;
}

}  // namespace

EventKind Transition::expected_event() const {
  if (!from) return EventKind::Created;
  if (!to) return EventKind::SyntheticCompleted;
  return EventKind::StateChanged;
}

void validate_scenario(const ScenarioSpec& spec) {
  if (spec.interval <= 0) throw ValidationError("", "interval must be positive");
  if (spec.max_running && *spec.max_running == 0)
    throw ValidationError("", "max_running must be positive");
  const auto index = index_jobs(spec);
  for (const auto& job : spec.jobs) {
    if (job.duration < 0) throw ValidationError(job.job_id, "negative duration");
    for (const auto* field : {&job.job_id, &job.account, &job.group, &job.command_path})
      if (field->empty() || has_whitespace(*field))
        throw ValidationError(job.job_id, "fields must be non-empty single tokens");
    for (const auto& dep : job.dependencies) {
      const auto it = index.find(dep);
      if (it == index.end()) throw ValidationError(job.job_id, "unknown dependency " + dep);
      if (job.mode == SubmitMode::Batch && spec.jobs[it->second].mode != SubmitMode::Batch)
        throw ValidationError(job.job_id, "batch job depends on manually submitted job " + dep);
    }
  }

  // Kahn's algorithm; leftovers sit on a cycle.
  std::vector<std::size_t> indegree(spec.jobs.size(), 0);
  std::vector<std::vector<std::size_t>> out(spec.jobs.size());
  for (std::size_t i = 0; i < spec.jobs.size(); ++i)
    for (const auto& dep : spec.jobs[i].dependencies) {
      out[index.at(dep)].push_back(i);
      ++indegree[i];
    }
  std::vector<std::size_t> queue;
  for (std::size_t i = 0; i < indegree.size(); ++i)
    if (indegree[i] == 0) queue.push_back(i);
  std::size_t visited = 0;
  while (!queue.empty()) {
    const auto v = queue.back();
    queue.pop_back();
    ++visited;
    for (auto w : out[v])
      if (--indegree[w] == 0) queue.push_back(w);
  }
  if (visited != spec.jobs.size())
    for (std::size_t i = 0; i < indegree.size(); ++i)
      if (indegree[i] > 0) throw ValidationError(spec.jobs[i].job_id, "dependency cycle");
}

Simulation simulate(const ScenarioSpec& spec) {
  validate_scenario(spec);
  const auto index = index_jobs(spec);
  const std::int64_t interval = spec.interval;

  std::vector<SimJob> jobs(spec.jobs.size());
  std::mt19937_64 rng(spec.seed);
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    jobs[i].spec = &spec.jobs[i];
    jobs[i].index = i;
    jobs[i].jitter = static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(interval));
    for (const auto& dep : spec.jobs[i].dependencies) {
      const auto d = index.at(dep);
      jobs[i].deps.push_back(d);
    }
  }

  std::vector<RawTransition> raw;
  auto move_to = [&](SimJob& job, Phase to, std::int64_t t) {
    raw.push_back({job.index, job.phase, to, t});
    job.phase = to;
    job.timeline.emplace_back(t, to);
  };
  auto deps_gone_at = [&](const SimJob& job) {
    std::int64_t latest = 0;
    for (auto d : job.deps) {
      if (jobs[d].gone == kNever) return kNever;
      latest = std::max(latest, jobs[d].gone);
    }
    return latest;
  };

  for (auto& job : jobs) {
    if (job.spec->mode == SubmitMode::Batch) {
      job.submit = 0;
      if (job.deps.empty()) job.ready = interval + job.jitter;
    } else if (job.deps.empty()) {
      job.submit = 0;
    }
  }

  std::size_t gone_count = 0;
  std::size_t running = 0;
  std::int64_t now = -1;
  while (gone_count < jobs.size()) {
    std::int64_t t = kNever;
    for (const auto& job : jobs) {
      if (job.phase == Phase::Unsubmitted) t = std::min(t, job.submit);
      if (job.phase == Phase::Pending && job.ready > now) t = std::min(t, job.ready);
      if (job.phase == Phase::Running || job.phase == Phase::Completing)
        t = std::min(t, job.next_change);
    }
    if (t == kNever) throw Error("simulation stalled");
    now = t;

    for (auto& job : jobs) {
      if (job.phase == Phase::Running && job.next_change == now) {
        move_to(job, Phase::Completing, now);
        job.next_change = now + interval;
        --running;
      }
    }
    for (auto& job : jobs) {
      if (job.phase == Phase::Completing && job.next_change == now) {
        move_to(job, Phase::Gone, now);
        job.gone = now;
        job.next_change = kNever;
        ++gone_count;
      }
    }
    for (auto& job : jobs) {
      if (job.phase == Phase::Unsubmitted && job.submit == kNever) {
        const auto g = deps_gone_at(job);
        if (g != kNever) job.submit = g + interval;
      }
      if (job.phase == Phase::Unsubmitted && job.submit == now) {
        move_to(job, Phase::Pending, now);
        if (job.spec->mode == SubmitMode::ManualAfterCompletion)
          job.ready = now + interval + job.jitter;
      }
      if (job.phase == Phase::Pending && job.ready == kNever) {
        const auto g = deps_gone_at(job);
        if (g != kNever) job.ready = g + interval + job.jitter;
      }
    }

    std::vector<SimJob*> startable;
    for (auto& job : jobs)
      if (job.phase == Phase::Pending && job.ready <= now) startable.push_back(&job);
    std::sort(startable.begin(), startable.end(), [](const SimJob* a, const SimJob* b) {
      return std::tie(a->ready, a->submit, a->index) < std::tie(b->ready, b->submit, b->index);
    });
    for (SimJob* job : startable) {
      if (spec.max_running && running >= *spec.max_running) break;
      if (job->spec->duration > 0) {
        move_to(*job, Phase::Running, now);
        job->next_change = now + job->spec->duration;
        ++running;
      } else {
        move_to(*job, Phase::Completing, now);
        job->next_change = now + interval;
      }
    }
  }

  // Rank = order of submission; rows and same-time transitions follow it.
  std::vector<std::size_t> order(jobs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::tie(jobs[a].submit, a) < std::tie(jobs[b].submit, b);
  });
  std::vector<std::size_t> rank(jobs.size());
  for (std::size_t r = 0; r < order.size(); ++r) rank[order[r]] = r;

  Simulation sim;
  const auto at = [](std::int64_t t) { return kSimulationEpoch + std::chrono::seconds{t}; };

  std::sort(raw.begin(), raw.end(), [&](const RawTransition& a, const RawTransition& b) {
    const bool da = a.to == Phase::Gone, db = b.to == Phase::Gone;
    return std::tie(a.at, da, rank[a.job]) < std::tie(b.at, db, rank[b.job]);
  });
  for (const auto& r : raw)
    sim.oracle.transitions.push_back(
        {jobs[r.job].spec->job_id, visible_state(r.from), visible_state(r.to), at(r.at)});

  std::set<std::int64_t> times;
  std::int64_t end = 0;
  for (const auto& r : raw) {
    times.insert(r.at);
    end = std::max(end, r.at);
  }
  for (std::int64_t t = 0; t <= end; t += interval) times.insert(t);

  for (const std::int64_t t : times) {
    std::vector<JobRow> rows;
    for (const std::size_t i : order) {
      const auto& job = jobs[i];
      Phase phase = Phase::Unsubmitted;
      for (const auto& [when, p] : job.timeline) {
        if (when > t) break;
        phase = p;
      }
      if (phase == Phase::Unsubmitted || phase == Phase::Gone) continue;

      std::string dependency = "(null)";
      if (phase == Phase::Pending && job.spec->mode == SubmitMode::Batch) {
        std::string remaining;
        for (const auto d : job.deps)
          if (jobs[d].gone > t) remaining += ":" + jobs[d].spec->job_id;
        if (!remaining.empty()) dependency = "afterok" + remaining;
      }
      rows.push_back({job.spec->account, job.spec->job_id, dependency, job.spec->command_path,
                      to_job_state(phase), job.spec->group, at(t)});
    }
    sim.snapshots.push_back({at(t), serialize_snapshot(rows)});
  }

  // Ground-truth cases: weakly connected components of the logical dependencies.
  std::vector<std::size_t> parent(jobs.size());
  for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = i;
  const auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& job : jobs)
    for (const auto d : job.deps) {
      const auto a = find(job.index), b = find(d);
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  for (const auto& job : jobs) {
    sim.oracle.true_cases[job.spec->job_id] = "case-" + jobs[find(job.index)].spec->job_id;
    sim.oracle.stage_durations[job.spec->job_id] = job.spec->duration;
  }
  return sim;
}

ScenarioSpec load_scenario(std::string_view text) {
  ScenarioSpec spec;
  std::size_t line_number = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    ++line_number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim_copy(line);
    if (body.empty()) continue;

    std::istringstream tokens(body);
    std::string first;
    tokens >> first;
    if (first != "job") {
      const auto eq = first.find('=');
      std::string extra;
      if (eq == std::string::npos || (tokens >> extra))
        throw ParseError(line_number, "expected 'job ...' or key=value header");
      const std::string key = first.substr(0, eq), value = first.substr(eq + 1);
      if (key == "seed") spec.seed = static_cast<std::uint64_t>(parse_int(value, line_number, key));
      else if (key == "interval") spec.interval = parse_int(value, line_number, key);
      else if (key == "max_running")
        spec.max_running = static_cast<std::size_t>(parse_int(value, line_number, key));
      else throw ParseError(line_number, "unknown header '" + key + "'");
      continue;
    }

    ScenarioJob job;
    if (!(tokens >> job.job_id)) throw ParseError(line_number, "missing job id");
    std::set<std::string> seen;
    std::string kv;
    while (tokens >> kv) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ParseError(line_number, "expected key=value, got '" + kv + "'");
      const std::string key = kv.substr(0, eq), value = kv.substr(eq + 1);
      if (!seen.insert(key).second) throw ParseError(line_number, "repeated key '" + key + "'");
      if (key == "account") job.account = value;
      else if (key == "group") job.group = value;
      else if (key == "cmd") job.command_path = value;
      else if (key == "dur") job.duration = parse_int(value, line_number, key);
      else if (key == "deps") {
        if (value != "-") {
          std::istringstream list(value);
          std::string dep;
          while (std::getline(list, dep, ','))
            if (!dep.empty()) job.dependencies.push_back(dep);
        }
      } else if (key == "mode") {
        if (value == "batch") job.mode = SubmitMode::Batch;
        else if (value == "manual") job.mode = SubmitMode::ManualAfterCompletion;
        else throw ParseError(line_number, "mode must be batch or manual");
      } else {
        throw ParseError(line_number, "unknown key '" + key + "'");
      }
    }
    for (const char* required : {"account", "group", "cmd", "dur"})
      if (!seen.contains(required))
        throw ParseError(line_number, std::string("missing ") + required);
    spec.jobs.push_back(std::move(job));
  }
  validate_scenario(spec);
  return spec;
}

ScenarioSpec load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoFailure("cannot open " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return load_scenario(text.str());
}

std::string serialize_scenario(const ScenarioSpec& spec) {
  std::ostringstream out;
  out << "seed=" << spec.seed << '\n' << "interval=" << spec.interval << '\n';
  if (spec.max_running) out << "max_running=" << *spec.max_running << '\n';
  for (const auto& job : spec.jobs) {
    std::string deps;
    for (const auto& d : job.dependencies) deps += (deps.empty() ? "" : ",") + d;
    out << "job " << job.job_id << " account=" << job.account << " group=" << job.group
        << " cmd=" << job.command_path << " dur=" << job.duration
        << " deps=" << (deps.empty() ? "-" : deps)
        << " mode=" << (job.mode == SubmitMode::Batch ? "batch" : "manual") << '\n';
  }
  return out.str();
}

std::string oracle_transitions_csv(const Oracle& oracle) {
  auto code = [](const std::optional<JobState>& s) { return s ? s->code() : std::string("-"); };
  std::string out = "job_id,from,to,timestamp,expected_event\n";
  for (const auto& t : oracle.transitions)
    out += csv_escape(t.job_id) + ',' + code(t.from) + ',' + code(t.to) + ',' +
           format_iso8601(t.at) + ',' + to_string(t.expected_event()) + '\n';
  return out;
}

}  // namespace hpcpm
