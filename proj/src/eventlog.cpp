#include "hpcpm/eventlog.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <tuple>

#include "hpcpm/error.h"

namespace hpcpm {

namespace {

constexpr std::size_t kColumns = 9;

// Reads one RFC 4180 record. Returns false at end of input.
bool read_record(std::istream& in, std::vector<std::string>& fields) {
  fields.clear();
  if (in.peek() == std::char_traits<char>::eof()) return false;
  std::string field;
  bool quoted = false, after_quote = false;
  char c;
  while (in.get(c)) {
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get();
          field += '"';
        } else {
          quoted = false;
          after_quote = true;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
      after_quote = false;
    } else if (c == '\n') {
      break;
    } else if (c == '\r' && in.peek() == '\n') {
      // CRLF
    } else if (c == '"' && field.empty() && !after_quote) {
      quoted = true;
    } else {
      field += c;
    }
  }
  fields.push_back(std::move(field));
  return true;
}

void write_row(std::ostream& out, const std::string& case_id, const std::string& activity,
               const JobState& state, EventKind kind, Timestamp ts, const std::string& job_id,
               const std::string& account, const std::string& group, const std::string& dep) {
  out << csv_escape(case_id) << ',' << csv_escape(activity) << ',' << csv_escape(state.code())
      << ',' << to_string(kind) << ',' << format_iso8601(ts) << ',' << csv_escape(job_id) << ','
      << csv_escape(account) << ',' << csv_escape(group) << ',' << csv_escape(dep) << '\n';
}

template <typename F>
void read_rows(std::istream& in, F&& on_row) {
  std::vector<std::string> fields;
  if (!read_record(in, fields)) throw SchemaMismatch("");
  std::string header;
  for (std::size_t i = 0; i < fields.size(); ++i) header += (i ? "," : "") + fields[i];
  if (header != kCsvHeader) throw SchemaMismatch(header);

  std::size_t row = 0;
  while (read_record(in, fields)) {
    ++row;
    if (fields.size() == 1 && fields[0].empty()) continue;
    if (fields.size() != kColumns)
      throw ParseError(row + 1, "expected " + std::to_string(kColumns) + " fields, got " +
                                    std::to_string(fields.size()));
    CaseEvent e;
    e.case_id = std::move(fields[0]);
    e.activity = std::move(fields[1]);
    e.lifecycle = JobState::from_code(fields[2]);
    const auto kind = event_kind_from_string(fields[3]);
    if (!kind) throw ParseError(row + 1, "unknown event kind '" + fields[3] + "'");
    e.kind = *kind;
    const auto ts = parse_iso8601(fields[4]);
    if (!ts) throw BadTimestamp(row, fields[4]);
    e.timestamp = *ts;
    e.job_id = std::move(fields[5]);
    e.account = std::move(fields[6]);
    e.group = std::move(fields[7]);
    e.dependency_raw = std::move(fields[8]);
    on_row(std::move(e));
  }
  if (in.bad()) throw IoFailure("read error");
}

}  // namespace

JobEvent CaseEvent::to_job_event() const {
  return {job_id, account, group, activity, lifecycle, dependency_raw, kind, timestamp};
}

std::vector<JobEvent> CaseLog::job_events() const {
  std::vector<JobEvent> out;
  out.reserve(events.size());
  for (const auto& e : events) out.push_back(e.to_job_event());
  return out;
}

void sort_case_log(CaseLog& log) {
  std::stable_sort(log.events.begin(), log.events.end(),
                   [](const CaseEvent& a, const CaseEvent& b) {
                     if (a.case_id != b.case_id) return a.case_id < b.case_id;
                     if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
                     return job_id_less(a.job_id, b.job_id);
                   });
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::size_t write_csv(const CaseLog& log, std::ostream& out) {
  out << kCsvHeader << '\n';
  for (const auto& e : log.events)
    write_row(out, e.case_id, e.activity, e.lifecycle, e.kind, e.timestamp, e.job_id, e.account,
              e.group, e.dependency_raw);
  out.flush();
  if (!out) throw IoFailure("write failed");
  return log.events.size();
}

std::size_t write_csv(const CaseLog& log, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoFailure("cannot open " + path + " for writing");
  return write_csv(log, out);
}

CaseLog read_csv(std::istream& in) {
  CaseLog log;
  read_rows(in, [&](CaseEvent&& e) { log.events.push_back(std::move(e)); });
  return log;
}

CaseLog read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot open " + path);
  return read_csv(in);
}

std::size_t write_events_csv(std::span<const JobEvent> events, std::ostream& out) {
  out << kCsvHeader << '\n';
  for (const auto& e : events)
    write_row(out, "", e.activity, e.state, e.kind, e.timestamp, e.job_id, e.account, e.group,
              e.dependency_raw);
  out.flush();
  if (!out) throw IoFailure("write failed");
  return events.size();
}

std::vector<JobEvent> read_events_csv(std::istream& in) {
  std::vector<JobEvent> events;
  read_rows(in, [&](CaseEvent&& e) { events.push_back(e.to_job_event()); });
  return events;
}

LogStats compute_stats(const CaseLog& log,
                       const std::map<std::string, DependencySpec>& first_deps) {
  LogStats s;
  s.num_events = log.events.size();
  if (log.events.empty()) return s;

  // A job's account is taken from its earliest event.
  std::map<std::string, std::pair<Timestamp, std::string>> earliest;
  Timestamp lo = log.events.front().timestamp, hi = lo;
  for (const auto& e : log.events) {
    auto [it, fresh] = earliest.try_emplace(e.job_id, e.timestamp, e.account);
    if (!fresh) it->second = std::min(it->second, std::pair{e.timestamp, e.account});
    lo = std::min(lo, e.timestamp);
    hi = std::max(hi, e.timestamp);
  }
  s.window = {lo, hi};

  std::set<std::string> accounts, explicit_accounts;
  std::size_t explicit_jobs = 0;
  for (const auto& [job, first] : earliest) {
    const auto& account = first.second;
    accounts.insert(account);
    const auto it = first_deps.find(job);
    if (it != first_deps.end() && !it->second.empty()) {
      ++explicit_jobs;
      explicit_accounts.insert(account);
    }
  }
  s.num_unique_jobs = earliest.size();
  s.num_accounts = accounts.size();
  s.pct_jobs_explicit = double(explicit_jobs) / double(s.num_unique_jobs);
  s.pct_accounts_explicit = double(explicit_accounts.size()) / double(s.num_accounts);
  return s;
}

std::string render_stats(const LogStats& s) {
  auto pct = [](double f) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f%%", f * 100.0);
    return std::string(buf);
  };
  const std::vector<std::pair<std::string, std::string>> rows = {
      {"Number of events", std::to_string(s.num_events)},
      {"Number of unique submitted jobs", std::to_string(s.num_unique_jobs)},
      {"Number of accounts", std::to_string(s.num_accounts)},
      {"Percentage of accounts who submitted jobs with explicit interdependencies",
       pct(s.pct_accounts_explicit)},
      {"Percentage of jobs defined with explicit interdependencies", pct(s.pct_jobs_explicit)},
      {"Observation window",
       s.window ? format_iso8601(s.window->first) + " to " + format_iso8601(s.window->second)
                : "-"},
  };
  std::size_t width = 0;
  for (const auto& [label, _] : rows) width = std::max(width, label.size());
  std::string out;
  for (const auto& [label, value] : rows)
    out += label + std::string(width - label.size() + 2, ' ') + value + '\n';
  return out;
}

}  // namespace hpcpm
