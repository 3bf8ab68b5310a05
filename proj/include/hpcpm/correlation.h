#pragma once

// Case-id assignment for job events: dependency-graph components (explicit)
// or ACCOUNT-GROUP keys (implicit).

#include <map>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hpcpm/eventlog.h"
#include "hpcpm/observer.h"

namespace hpcpm {

/// Edge (from, to) means "to depends on from".
struct DependencyGraph {
  std::set<std::string> vertices;
  std::set<std::string> external;  // referenced but never observed
  std::set<std::pair<std::string, std::string>> edges;
};

struct CyclicDependency {
  std::vector<std::string> job_ids;  // the dropped edge's endpoints, from then to
};

struct GraphBuild {
  DependencyGraph graph;
  std::vector<CyclicDependency> cycles;
};

/// Edges come from each job's first dependency, regardless of condition tag.
/// Targets that were never observed become isolated external vertices. An
/// edge that would close a cycle is dropped and reported.
GraphBuild build_dependency_graph(std::span<const JobEvent> events,
                                  const std::map<std::string, DependencySpec>& first_deps);

enum class CaseStrategy { Explicit, Implicit };

struct CaseAssignment {
  CaseStrategy strategy = CaseStrategy::Explicit;
  std::map<std::string, std::string> cases;  // job_id -> case_id

  std::size_t case_count() const;
};

struct ExplicitOptions {
  /// Replace the concatenated id list with a 16-hex-digit digest.
  bool hash_case_ids = false;
};

/// One case per weakly connected component, named "JID" followed by the
/// member ids in descending order: {1,2,3,4} -> "JID4321".
CaseAssignment assign_cases_explicit(const DependencyGraph& graph,
                                     const ExplicitOptions& options = {});

/// case_id = account + "-" + group; an empty or "(null)" group reads "default".
CaseAssignment assign_cases_implicit(std::span<const JobEvent> events);

/// Attaches case ids and sorts by (case_id, timestamp, job_id). Throws
/// UnassignedJob if an event's job has no case.
CaseLog apply_cases(std::span<const JobEvent> events, const CaseAssignment& assignment);

/// The component label as used by assign_cases_explicit.
std::string component_case_id(std::vector<std::string> job_ids, bool hashed = false);

}  // namespace hpcpm
