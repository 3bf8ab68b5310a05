#include "hpcpm/snapshot.h"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace hpcpm {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    const std::size_t start = i;
    while (i < s.size() && !is_space(s[i])) ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string or_null(const std::string& s) { return s.empty() ? "(null)" : s; }

// Targets may carry a state annotation ("2(unfulfilled)") or a delay ("2+10").
std::string_view strip_target_suffix(std::string_view t) {
  const auto cut = t.find_first_of("(+");
  return trim(t.substr(0, cut));
}

}  // namespace

JobState JobState::from_code(std::string_view code) {
  if (code == "PD") return Kind::Pending;
  if (code == "R") return Kind::Running;
  if (code == "CG") return Kind::Completing;
  if (code == "CD") return Kind::Completed;
  if (code == "S") return Kind::Suspended;
  return other(std::string(code));
}

JobState JobState::other(std::string code) {
  JobState s(Kind::Other);
  s.other_code_ = std::move(code);
  return s;
}

std::string JobState::code() const {
  switch (kind_) {
    case Kind::Pending: return "PD";
    case Kind::Running: return "R";
    case Kind::Completing: return "CG";
    case Kind::Completed: return "CD";
    case Kind::Suspended: return "S";
    case Kind::Other: return other_code_;
  }
  return other_code_;
}

std::vector<std::string> DependencySpec::targets() const {
  std::vector<std::string> out;
  for (const auto& clause : clauses)
    for (const auto& t : clause.targets)
      if (std::find(out.begin(), out.end(), t) == out.end()) out.push_back(t);
  return out;
}

std::string to_string(DependencyCondition c) {
  switch (c) {
    case DependencyCondition::AfterOk: return "afterok";
    case DependencyCondition::AfterAny: return "afterany";
    case DependencyCondition::AfterNotOk: return "afternotok";
    case DependencyCondition::After: return "after";
    case DependencyCondition::Unknown: return "unknown";
  }
  return "unknown";
}

SnapshotParse parse_snapshot(std::string_view text, Timestamp observed_at) {
  SnapshotParse out;
  std::size_t line_number = 0;
  bool first_nonblank = true;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_number;

    const auto cols = split_ws(line);
    if (cols.empty()) continue;
    if (first_nonblank && cols.front() == "ACCOUNT") {
      first_nonblank = false;
      continue;
    }
    first_nonblank = false;
    if (cols.size() < 6) {
      out.errors.push_back({line_number, std::string(trim(line))});
      continue;
    }

    JobRow row;
    row.account = cols[0];
    row.job_id = cols[1];
    row.dependency_raw = cols[2];
    // Command spans from the fourth column to the end of the third-to-last,
    // keeping its internal spacing.
    const char* cmd_begin = cols[3].data();
    const char* cmd_end = cols[cols.size() - 3].data() + cols[cols.size() - 3].size();
    row.command_path.assign(cmd_begin, cmd_end);
    row.state = JobState::from_code(cols[cols.size() - 2]);
    row.group = cols.back();
    row.observed_at = observed_at;
    out.rows.push_back(std::move(row));
  }
  return out;
}

DependencySpec parse_dependency_spec(std::string_view raw) {
  DependencySpec spec;
  raw = trim(raw);
  const std::string low = lower(raw);
  if (low.empty() || low == "(null)" || low == "null") return spec;

  std::size_t pos = 0;
  while (pos <= raw.size()) {
    const auto sep = raw.find_first_of(",?", pos);
    const std::string_view clause_text =
        trim(raw.substr(pos, sep == std::string_view::npos ? std::string_view::npos : sep - pos));
    pos = sep == std::string_view::npos ? raw.size() + 1 : sep + 1;
    if (clause_text.empty()) continue;

    DependencyClause clause;
    const auto colon = clause_text.find(':');
    const std::string_view tag = clause_text.substr(0, colon);
    clause.tag = std::string(tag);
    const std::string ltag = lower(tag);
    if (ltag == "afterok") clause.condition = DependencyCondition::AfterOk;
    else if (ltag == "afterany") clause.condition = DependencyCondition::AfterAny;
    else if (ltag == "afternotok") clause.condition = DependencyCondition::AfterNotOk;
    else if (ltag == "after") clause.condition = DependencyCondition::After;
    else clause.condition = DependencyCondition::Unknown;

    if (colon != std::string_view::npos) {
      std::string_view rest = clause_text.substr(colon + 1);
      while (true) {
        const auto c = rest.find(':');
        const auto target = strip_target_suffix(rest.substr(0, c));
        if (!target.empty()) clause.targets.emplace_back(target);
        if (c == std::string_view::npos) break;
        rest.remove_prefix(c + 1);
      }
    }
    spec.clauses.push_back(std::move(clause));
  }
  return spec;
}

std::string format_dependency_spec(const DependencySpec& spec) {
  if (spec.empty()) return "(null)";
  std::string out;
  for (const auto& clause : spec.clauses) {
    if (!out.empty()) out += ',';
    out += clause.condition == DependencyCondition::Unknown ? clause.tag
                                                             : to_string(clause.condition);
    for (const auto& t : clause.targets) out += ':' + t;
  }
  return out;
}

std::string normalize_command(std::string_view command_path) {
  std::string_view s = trim(command_path);
  s = s.substr(0, s.find_first_of(" \t\r\n\v\f"));
  while (!s.empty() && s.back() == '/') s.remove_suffix(1);
  if (s.empty()) return "<unknown>";
  const auto slash = s.rfind('/');
  return std::string(slash == std::string_view::npos ? s : s.substr(slash + 1));
}

std::string serialize_snapshot(std::span<const JobRow> rows) {
  std::ostringstream out;
  out << "ACCOUNT JOBID DEPENDENCY COMMAND ST GROUP\n";
  for (const auto& r : rows) {
    out << or_null(r.account) << ' ' << r.job_id << ' ' << or_null(r.dependency_raw) << ' '
        << or_null(r.command_path) << ' ' << or_null(r.state.code()) << ' ' << or_null(r.group)
        << '\n';
  }
  return out.str();
}

std::string snapshot_filename(Timestamp t) {
  return "snapshot_" + format_iso8601_basic(t) + ".txt";
}

std::optional<Timestamp> parse_snapshot_filename(std::string_view name) {
  constexpr std::string_view prefix = "snapshot_", suffix = ".txt";
  if (name.size() <= prefix.size() + suffix.size() || !name.starts_with(prefix) ||
      !name.ends_with(suffix))
    return std::nullopt;
  name.remove_prefix(prefix.size());
  name.remove_suffix(suffix.size());
  return parse_iso8601(name);
}

bool is_numeric_job_id(std::string_view id) {
  return !id.empty() && std::all_of(id.begin(), id.end(),
                                    [](unsigned char c) { return std::isdigit(c) != 0; });
}

bool job_id_less(std::string_view a, std::string_view b) {
  const bool na = is_numeric_job_id(a), nb = is_numeric_job_id(b);
  if (na != nb) return na;
  if (na) {
    auto strip = [](std::string_view s) {
      while (s.size() > 1 && s.front() == '0') s.remove_prefix(1);
      return s;
    };
    const auto sa = strip(a), sb = strip(b);
    if (sa.size() != sb.size()) return sa.size() < sb.size();
    if (sa != sb) return sa < sb;
  }
  return a < b;
}

}  // namespace hpcpm
