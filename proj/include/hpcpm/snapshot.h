#pragma once

// Parsing of `squeue -o "%a %i %E %o %t %g"` output into structured rows.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hpcpm/time.h"

namespace hpcpm {

/// Compact scheduler state. Unrecognized codes are kept verbatim in Other.
class JobState {
 public:
  enum class Kind { Pending, Running, Completing, Completed, Suspended, Other };

  JobState() = default;
  /* implicit */ JobState(Kind kind) : kind_(kind) {}

  static JobState from_code(std::string_view code);
  static JobState other(std::string code);

  Kind kind() const { return kind_; }
  /// "PD", "R", "CG", "CD", "S", or the raw code for Other.
  std::string code() const;

  friend bool operator==(const JobState&, const JobState&) = default;

 private:
  Kind kind_ = Kind::Pending;
  std::string other_code_;
};

enum class DependencyCondition { AfterOk, AfterAny, AfterNotOk, After, Unknown };

struct DependencyClause {
  DependencyCondition condition = DependencyCondition::Unknown;
  std::string tag;  // as written; meaningful for Unknown
  std::vector<std::string> targets;

  friend bool operator==(const DependencyClause&, const DependencyClause&) = default;
};

struct DependencySpec {
  std::vector<DependencyClause> clauses;

  bool empty() const { return clauses.empty(); }
  /// All target job ids, clause order, duplicates removed.
  std::vector<std::string> targets() const;

  friend bool operator==(const DependencySpec&, const DependencySpec&) = default;
};

struct JobRow {
  std::string account;
  std::string job_id;
  std::string dependency_raw;
  std::string command_path;
  JobState state;
  std::string group;
  Timestamp observed_at{};

  friend bool operator==(const JobRow&, const JobRow&) = default;
};

struct MalformedRow {
  std::size_t line_number = 0;  // 1-based
  std::string line;
};

struct SnapshotParse {
  std::vector<JobRow> rows;
  std::vector<MalformedRow> errors;
};

/// Rows in file order. A first token of "ACCOUNT" marks a header line. The
/// command column may carry arguments, so the three leading and two trailing
/// columns are taken positionally and everything in between is the command.
/// Lines with fewer than six columns are reported and skipped.
SnapshotParse parse_snapshot(std::string_view text, Timestamp observed_at);

/// Total: "(null)", "NULL" and "" denote no dependencies; anything
/// unrecognized degrades to Unknown clauses.
DependencySpec parse_dependency_spec(std::string_view raw);

/// Inverse of parse_dependency_spec for well-formed specs, "(null)" if empty.
std::string format_dependency_spec(const DependencySpec& spec);

/// "/home/u/run.sh --n 5" -> "run.sh". All-separator input yields "<unknown>".
std::string normalize_command(std::string_view command_path);

/// Header plus one line per row, empty fields rendered as "(null)".
std::string serialize_snapshot(std::span<const JobRow> rows);

/// "snapshot_20221207T115145Z.txt"
std::string snapshot_filename(Timestamp t);
std::optional<Timestamp> parse_snapshot_filename(std::string_view filename);

/// Numeric ids compare by value and precede non-numeric ids, which compare
/// lexicographically.
bool job_id_less(std::string_view a, std::string_view b);
bool is_numeric_job_id(std::string_view id);

std::string to_string(DependencyCondition c);

}  // namespace hpcpm
