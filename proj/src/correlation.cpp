#include "hpcpm/correlation.h"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <functional>

#include "hpcpm/error.h"

namespace hpcpm {

namespace {

// Does `to` reach `from` along existing edges? Then (from, to) closes a cycle.
bool reaches(const std::map<std::string, std::vector<std::string>>& succ, const std::string& start,
             const std::string& goal) {
  std::vector<const std::string*> stack{&start};
  std::set<std::string_view> visited;
  while (!stack.empty()) {
    const std::string& v = *stack.back();
    stack.pop_back();
    if (v == goal) return true;
    if (!visited.insert(v).second) continue;
    if (auto it = succ.find(v); it != succ.end())
      for (const auto& w : it->second) stack.push_back(&w);
  }
  return false;
}

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::size_t CaseAssignment::case_count() const {
  std::set<std::string_view> ids;
  for (const auto& [_, c] : cases) ids.insert(c);
  return ids.size();
}

GraphBuild build_dependency_graph(std::span<const JobEvent> events,
                                  const std::map<std::string, DependencySpec>& first_deps) {
  GraphBuild out;
  auto& g = out.graph;
  for (const auto& e : events) g.vertices.insert(e.job_id);

  std::vector<std::string> jobs(g.vertices.begin(), g.vertices.end());
  std::sort(jobs.begin(), jobs.end(), job_id_less);

  std::map<std::string, std::vector<std::string>> succ;
  for (const auto& job : jobs) {
    const auto it = first_deps.find(job);
    if (it == first_deps.end()) continue;
    for (const auto& target : it->second.targets()) {
      if (!g.vertices.contains(target) || g.external.contains(target)) {
        g.external.insert(target);
        continue;
      }
      if (target == job || reaches(succ, job, target)) {
        out.cycles.push_back({{target, job}});
        continue;
      }
      if (g.edges.emplace(target, job).second) succ[target].push_back(job);
    }
  }
  g.vertices.insert(g.external.begin(), g.external.end());
  return out;
}

std::string component_case_id(std::vector<std::string> ids, bool hashed) {
  std::sort(ids.begin(), ids.end(), [](const std::string& a, const std::string& b) {
    const bool na = is_numeric_job_id(a), nb = is_numeric_job_id(b);
    if (na && nb) return job_id_less(b, a);  // descending by value
    if (na != nb) return na;
    return a < b;
  });
  std::string joined;
  for (const auto& id : ids) joined += id;
  if (!hashed) return "JID" + joined;
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(joined)));
  return std::string("JIDx") + buf;
}

CaseAssignment assign_cases_explicit(const DependencyGraph& graph, const ExplicitOptions& options) {
  std::map<std::string, std::vector<std::string>> adj;
  for (const auto& [from, to] : graph.edges) {
    adj[from].push_back(to);
    adj[to].push_back(from);
  }

  std::vector<std::vector<std::string>> components;
  std::set<std::string> visited;
  for (const auto& start : graph.vertices) {
    if (visited.contains(start)) continue;
    std::vector<std::string> component;
    std::vector<std::string> stack{start};
    visited.insert(start);
    while (!stack.empty()) {
      std::string v = std::move(stack.back());
      stack.pop_back();
      if (auto it = adj.find(v); it != adj.end())
        for (const auto& w : it->second)
          if (visited.insert(w).second) stack.push_back(w);
      component.push_back(std::move(v));
    }
    std::sort(component.begin(), component.end(), job_id_less);
    components.push_back(std::move(component));
  }
  std::sort(components.begin(), components.end(),
            [](const auto& a, const auto& b) { return job_id_less(a.front(), b.front()); });

  // Concatenations are not injective ({1,2} and {21} both give JID21); later
  // components get a "#n" suffix.
  CaseAssignment out;
  out.strategy = CaseStrategy::Explicit;
  std::set<std::string> used;
  for (const auto& component : components) {
    const std::string base = component_case_id(component, options.hash_case_ids);
    std::string case_id = base;
    for (int n = 2; !used.insert(case_id).second; ++n) case_id = base + "#" + std::to_string(n);
    for (const auto& v : component) out.cases.emplace(v, case_id);
  }
  return out;
}

CaseAssignment assign_cases_implicit(std::span<const JobEvent> events) {
  CaseAssignment out;
  out.strategy = CaseStrategy::Implicit;
  for (const auto& e : events) {
    const bool no_group = e.group.empty() || e.group == "(null)";
    out.cases.emplace(e.job_id, e.account + "-" + (no_group ? std::string("default") : e.group));
  }
  return out;
}

CaseLog apply_cases(std::span<const JobEvent> events, const CaseAssignment& assignment) {
  CaseLog log;
  log.events.reserve(events.size());
  for (const auto& e : events) {
    const auto it = assignment.cases.find(e.job_id);
    if (it == assignment.cases.end()) throw UnassignedJob(e.job_id);
    log.events.push_back({it->second, e.activity, e.state, e.kind, e.timestamp, e.job_id,
                          e.account, e.group, e.dependency_raw});
  }
  sort_case_log(log);
  return log;
}

}  // namespace hpcpm
