#include <doctest.h>

#include <algorithm>
#include <random>

#include "hpcpm/correlation.h"
#include "hpcpm/error.h"
#include "support/oracles.h"

using namespace hpcpm;

namespace {

const Timestamp t0{std::chrono::seconds{1670413905}};

JobEvent created(std::string id, std::string dep = "(null)", std::string account = "acc",
                 std::string group = "g", std::int64_t dt = 0) {
  return {std::move(id), std::move(account), std::move(group), "job.sh",
          JobState::Kind::Pending, std::move(dep), EventKind::Created,
          t0 + std::chrono::seconds{dt}};
}

std::vector<JobEvent> chain_events() {
  return {created("1"), created("2", "afterok:1"), created("3", "afterok:1"),
          created("4", "afterok:2:3")};
}

}  // namespace

TEST_CASE("four-job dependency graph") {
  const auto events = chain_events();
  const auto build = build_dependency_graph(events, first_dependencies(events));
  using E = std::pair<std::string, std::string>;
  CHECK(build.graph.edges == std::set<E>{{"1", "2"}, {"1", "3"}, {"2", "4"}, {"3", "4"}});
  CHECK(build.graph.vertices.size() == 4);
  CHECK(build.cycles.empty());
}

TEST_CASE("no dependencies: isolated vertices") {
  const std::vector events{created("1"), created("2"), created("3"), created("4")};
  const auto build = build_dependency_graph(events, first_dependencies(events));
  CHECK(build.graph.edges.empty());
  CHECK(build.graph.vertices.size() == 4);
  const auto a = assign_cases_explicit(build.graph);
  CHECK(a.case_count() == 4);
  CHECK(a.cases.at("2") == "JID2");
}

TEST_CASE("unobserved targets become external placeholders") {
  const std::vector events{created("5", "afterok:77")};
  const auto build = build_dependency_graph(events, first_dependencies(events));
  CHECK(build.graph.edges.empty());
  CHECK(build.graph.external == std::set<std::string>{"77"});
  CHECK(build.graph.vertices == std::set<std::string>{"5", "77"});
}

TEST_CASE("cycles are reported and broken") {
  const std::vector events{created("1", "afterok:3"), created("2", "afterok:1"),
                           created("3", "afterok:2")};
  const auto build = build_dependency_graph(events, first_dependencies(events));
  CHECK(build.cycles.size() == 1);
  CHECK(build.graph.edges.size() == 2);
  // Still one component.
  CHECK(assign_cases_explicit(build.graph).case_count() == 1);

  const std::vector self{created("1", "afterok:1")};
  CHECK(build_dependency_graph(self, first_dependencies(self)).cycles.size() == 1);
}

TEST_CASE("explicit case ids concatenate members in descending order") {
  const auto events = chain_events();
  const auto a = assign_cases_explicit(build_dependency_graph(events, first_dependencies(events)).graph);
  for (const auto* id : {"1", "2", "3", "4"}) CHECK(a.cases.at(id) == "JID4321");

  CHECK(component_case_id({"8", "9", "10", "11"}) == "JID111098");
  CHECK(component_case_id({"42"}) == "JID42");
  CHECK(component_case_id({"7", "123_4", "abc", "10"}) == "JID107123_4abc");
}

TEST_CASE("colliding concatenations stay distinct cases") {
  const std::vector events{created("1"), created("2", "afterok:1"), created("21")};
  const auto a = assign_cases_explicit(build_dependency_graph(events, first_dependencies(events)).graph);
  CHECK(a.case_count() == 2);
  CHECK(a.cases.at("1") == "JID21");
  CHECK(a.cases.at("2") == "JID21");
  CHECK(a.cases.at("21") == "JID21#2");
}

TEST_CASE("hashed case ids are stable 16-hex digests") {
  const auto h = component_case_id({"1", "2", "3", "4"}, true);
  CHECK(h.size() == 4 + 16);
  CHECK(h.starts_with("JIDx"));
  CHECK(h == component_case_id({"4", "3", "2", "1"}, true));
  CHECK(h != component_case_id({"1", "2", "3"}, true));
}

TEST_CASE("implicit case ids") {
  const std::vector events{created("1", "(null)", "thes1331", "p0"),
                           created("2", "(null)", "acc", "g1"), created("3", "(null)", "acc", "g2"),
                           created("4", "(null)", "acc", ""), created("5", "(null)", "acc", "(null)")};
  const auto a = assign_cases_implicit(events);
  CHECK(a.cases.at("1") == "thes1331-p0");
  CHECK(a.cases.at("2") != a.cases.at("3"));
  CHECK(a.cases.at("4") == "acc-default");
  CHECK(a.cases.at("5") == "acc-default");
}

TEST_CASE("implicit assignment ignores event order") {
  std::mt19937_64 rng(3);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto sim = simulate(oracle::random_scenario(seed));
    auto events = oracle::observe_simulation(sim);
    const auto before = assign_cases_implicit(events).cases;
    std::shuffle(events.begin(), events.end(), rng);
    CHECK(assign_cases_implicit(events).cases == before);
  }
}

TEST_CASE("apply_cases sorts and rejects unassigned jobs") {
  auto events = chain_events();
  std::reverse(events.begin(), events.end());
  const auto a = assign_cases_explicit(build_dependency_graph(events, first_dependencies(events)).graph);
  const auto log = apply_cases(events, a);
  REQUIRE(log.events.size() == 4);
  CHECK(log.events[0].job_id == "1");
  CHECK(log.events[3].job_id == "4");
  for (const auto& e : log.events) CHECK(e.case_id == "JID4321");

  CHECK(apply_cases({}, a).events.empty());

  CaseAssignment partial;
  partial.cases = {{"1", "c"}};
  CHECK_THROWS_AS(apply_cases(events, partial), UnassignedJob);
}

TEST_CASE("two disjoint chains give two components of four") {
  const auto sim = simulate(load_scenario(*bundled_scenario_text("two_chains")));
  const auto events = oracle::observe_simulation(sim);
  const auto a = assign_cases_explicit(build_dependency_graph(events, first_dependencies(events)).graph);
  CHECK(a.case_count() == 2);
  CHECK(a.cases.at("1") == "JID4321");
  CHECK(a.cases.at("8") == "JID111098");

  const auto log = apply_cases(events, a);
  std::map<std::string, std::size_t> per_case;
  for (const auto& e : log.events) ++per_case[e.case_id];
  const std::set<std::string> first_chain{"1", "2", "3", "4"};
  std::map<std::string, std::size_t> expected;
  for (const auto& t : sim.oracle.transitions)
    ++expected[first_chain.contains(t.job_id) ? "JID4321" : "JID111098"];
  CHECK(per_case == expected);
}

TEST_CASE("explicit partition equals union-find on random DAGs") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 300; ++i) {
    const auto dag = oracle::random_dag(rng, 30);
    std::map<std::string, std::vector<std::string>> deps;
    for (const auto& [from, to] : dag.edges) deps[to].push_back(from);
    std::vector<JobEvent> events;
    for (const auto& v : dag.vertices) {
      std::string raw = "(null)";
      if (deps.contains(v)) {
        raw = "afterok";
        for (const auto& d : deps[v]) raw += ":" + d;
      }
      events.push_back(created(v, raw));
    }
    const auto graph = build_dependency_graph(events, first_dependencies(events)).graph;
    const auto a = assign_cases_explicit(graph);
    CHECK(oracle::partition_of(a.cases) == oracle::union_find_partition(dag.vertices, dag.edges));
    CHECK(assign_cases_explicit(graph).cases == a.cases);
  }
}
