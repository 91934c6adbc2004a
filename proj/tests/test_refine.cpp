#include "doctest.h"
#include "rtrack/analyzer.hpp"
#include "rtrack/comparators.hpp"
#include "rtrack/refine.hpp"
#include "support/fixtures.hpp"

using namespace rtrack;

namespace {

Report full_engine(const Trace& trace) { return analyze(trace, Mode::Full); }
Report velodrome_engine(const Trace& trace) {
  return comparators::velodrome_check(trace).report;
}

}  // namespace

TEST_CASE("demoting a label turns its events into unary transactions") {
  Trace t = demote_labels(fixtures::stale_edge_cycle(), {"A"});
  CHECK(t.size() == 13);  // only `begin A` drops; that region never ended
  Report r = analyze(t, Mode::Full);
  // Regions B, C, D, E survive; t1's two events become unary transactions.
  CHECK(r.stats.transactions == 6);
}

TEST_CASE("refinement on the stale-edge fixture excludes exactly the blamed label") {
  auto result = refine(fixtures::stale_edge_cycle(), full_engine, 2);
  CHECK(result.excluded == std::set<std::string>{"A"});
  REQUIRE(result.iterations.size() == 3);
  CHECK(result.iterations[0].dynamic_violations == 1);
  CHECK(result.iterations[0].newly_excluded == std::vector<std::string>{"A"});
  CHECK(result.iterations[1].dynamic_violations == 0);
  CHECK(result.iterations[2].dynamic_violations == 0);
}

TEST_CASE("violation-free trace terminates with an empty exclusion set") {
  auto result = refine(fixtures::nonincreasing_cycle(), full_engine, 2);
  CHECK(result.excluded.empty());
  CHECK(result.iterations.size() == 2);  // two consecutive clean trials
}

TEST_CASE("threshold one stops after the first clean trial") {
  auto result = refine(fixtures::stale_edge_cycle(), full_engine, 1);
  CHECK(result.excluded == std::set<std::string>{"A"});
  CHECK(result.iterations.size() == 2);
}

TEST_CASE("an edge-starved graph checker can need more refinement rounds") {
  // The stale-edge pattern is extended so the masking transaction (label B)
  // carries its own increasing cycle against a fourth thread. The graph
  // checker blames B first, and only once B's markers are demoted does the
  // pair-starved relation resurface as fresh edges that expose label A. The
  // clock engine sees both violations in the first trial.
  Trace trace = parse_trace(
      "t1 begin A\n"
      "t1 w a\n"
      "t2 begin B\n"
      "t2 w p\n"
      "t2 w b\n"
      "t2 r a\n"
      "t4 begin X\n"
      "t4 r p\n"
      "t4 w q\n"
      "t4 end X\n"
      "t3 begin C\n"
      "t3 r b\n"
      "t3 w a\n"
      "t2 r q\n"
      "t2 end B\n"
      "t2 begin D\n"
      "t3 end C\n"
      "t3 begin E\n"
      "t3 w c\n"
      "t1 r c\n");

  auto rt = refine(trace, full_engine, 2);
  auto velo = refine(trace, velodrome_engine, 2);
  CHECK(rt.excluded == std::set<std::string>{"A", "B"});
  CHECK(velo.excluded == std::set<std::string>{"A", "B"});
  CHECK(velo.iterations.size() > rt.iterations.size());
}
