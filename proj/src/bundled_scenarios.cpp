#include <array>
#include <utility>

#include "hpcpm/simulator.h"

namespace hpcpm {

namespace {

// Pre-processing, two parallel jobs, merge.
constexpr std::string_view kFig1Explicit = R"(# dependencies declared at submission (sbatch --dependency)
seed=0
interval=30
job 1 account=jara0180 group=p2x cmd=/home/jara0180/p2x/pre-processing.sh dur=600 deps=- mode=batch
job 2 account=jara0180 group=p2x cmd=/home/jara0180/p2x/parallel-job1.sh dur=1800 deps=1 mode=batch
job 3 account=jara0180 group=p2x cmd=/home/jara0180/p2x/parallel-job2.sh dur=1800 deps=1 mode=batch
job 4 account=jara0180 group=p2x cmd=/home/jara0180/p2x/merge.sh dur=300 deps=2,3 mode=batch
)";

constexpr std::string_view kFig1Manual = R"(# same workflow, each job submitted by hand after its predecessors finished
seed=0
interval=30
job 1 account=jara0180 group=p2x cmd=/home/jara0180/p2x/pre-processing.sh dur=600 deps=- mode=manual
job 2 account=jara0180 group=p2x cmd=/home/jara0180/p2x/parallel-job1.sh dur=1800 deps=1 mode=manual
job 3 account=jara0180 group=p2x cmd=/home/jara0180/p2x/parallel-job2.sh dur=1800 deps=1 mode=manual
job 4 account=jara0180 group=p2x cmd=/home/jara0180/p2x/merge.sh dur=300 deps=2,3 mode=manual
)";

constexpr std::string_view kTwoChains = R"(# two executions of the same chain, both with declared dependencies
seed=0
interval=30
job 1 account=jara0180 group=p2x cmd=/home/jara0180/p2x/pre-processing.sh dur=600 deps=- mode=batch
job 2 account=jara0180 group=p2x cmd=/home/jara0180/p2x/parallel-job1.sh dur=1800 deps=1 mode=batch
job 3 account=jara0180 group=p2x cmd=/home/jara0180/p2x/parallel-job2.sh dur=1800 deps=1 mode=batch
job 4 account=jara0180 group=p2x cmd=/home/jara0180/p2x/merge.sh dur=300 deps=2,3 mode=batch
job 8 account=jara0180 group=p2x cmd=/home/jara0180/p2x/pre-processing.sh dur=540 deps=- mode=batch
job 9 account=jara0180 group=p2x cmd=/home/jara0180/p2x/parallel-job1.sh dur=1700 deps=8 mode=batch
job 10 account=jara0180 group=p2x cmd=/home/jara0180/p2x/parallel-job2.sh dur=1900 deps=8 mode=batch
job 11 account=jara0180 group=p2x cmd=/home/jara0180/p2x/merge.sh dur=320 deps=9,10 mode=batch
)";

// Two manual executions; the parallel pair runs in opposite orders.
constexpr std::string_view kFig8Parallel = R"(# no declared dependencies; one account-group
seed=0
interval=30
job 1 account=thes1331 group=p0 cmd=/home/thes1331/wf/Pre-processing dur=300 deps=- mode=manual
job 2 account=thes1331 group=p0 cmd=/home/thes1331/wf/Parallel-job1 dur=900 deps=1 mode=manual
job 3 account=thes1331 group=p0 cmd=/home/thes1331/wf/Parallel-job2 dur=900 deps=2 mode=manual
job 4 account=thes1331 group=p0 cmd=/home/thes1331/wf/Merge dur=120 deps=3 mode=manual
job 5 account=thes1331 group=p0 cmd=/home/thes1331/wf/Pre-processing dur=300 deps=4 mode=manual
job 6 account=thes1331 group=p0 cmd=/home/thes1331/wf/Parallel-job2 dur=900 deps=5 mode=manual
job 7 account=thes1331 group=p0 cmd=/home/thes1331/wf/Parallel-job1 dur=900 deps=6 mode=manual
job 8 account=thes1331 group=p0 cmd=/home/thes1331/wf/Merge dur=120 deps=7 mode=manual
)";

constexpr std::array<std::pair<std::string_view, std::string_view>, 4> kBundled = {{
    {"fig1_explicit", kFig1Explicit},
    {"fig1_manual", kFig1Manual},
    {"two_chains", kTwoChains},
    {"fig8_parallel", kFig8Parallel},
}};

}  // namespace

std::vector<std::string> bundled_scenario_names() {
  std::vector<std::string> out;
  for (const auto& [name, _] : kBundled) out.emplace_back(name);
  return out;
}

std::optional<std::string> bundled_scenario_text(std::string_view name) {
  for (const auto& [n, text] : kBundled)
    if (n == name) return std::string(text);
  return std::nullopt;
}

}  // namespace hpcpm
