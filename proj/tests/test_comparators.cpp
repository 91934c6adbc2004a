#include "doctest.h"
#include "rtrack/comparators.hpp"
#include "rtrack/differential.hpp"
#include "rtrack/gen.hpp"
#include "support/fixtures.hpp"

using namespace rtrack;
using comparators::aerodrome_check;
using comparators::naive_blame_check;
using comparators::velodrome_check;

TEST_CASE("velodrome on the fixtures") {
  auto cyc = velodrome_check(fixtures::nonincreasing_cycle());
  CHECK(cyc.report.non_serializable);
  CHECK(cyc.report.violations.empty());  // cycle found but non-increasing

  auto stale = velodrome_check(fixtures::stale_edge_cycle());
  CHECK(stale.report.non_serializable);
  CHECK(stale.report.violations.empty());  // the documented miss

  auto inc = velodrome_check(fixtures::increasing_cycle());
  CHECK(inc.report.non_serializable);
  REQUIRE(inc.report.violations.size() == 1);
  CHECK(inc.report.violations[0].thread == 0);

  auto ok = velodrome_check(parse_trace("t1 begin A\nt1 w x\nt1 end A\nt2 w y"));
  CHECK_FALSE(ok.report.non_serializable);
  CHECK(ok.report.violations.empty());
}

TEST_CASE("naive blame on the fixtures") {
  auto cyc = naive_blame_check(fixtures::nonincreasing_cycle());
  CHECK(cyc.report.non_serializable);
  REQUIRE(cyc.report.violations.size() == 1);  // the false positive, by design
  CHECK(cyc.report.violations[0].thread == 0);
  CHECK(cyc.report.violations[0].ordinal == 1);
  CHECK(cyc.report.violations[0].event == 14);

  auto stale = naive_blame_check(fixtures::stale_edge_cycle());
  CHECK(stale.report.non_serializable);
  CHECK(stale.report.violation_set().count({0, 1}) == 1);

  auto ok = naive_blame_check(parse_trace("t1 w x\nt2 w y\nt1 r x"));
  CHECK_FALSE(ok.report.non_serializable);
  CHECK(ok.report.violations.empty());
}

TEST_CASE("aerodrome on the fixtures") {
  auto cyc = aerodrome_check(fixtures::nonincreasing_cycle());
  CHECK(cyc.report.non_serializable);
  CHECK(cyc.report.first_nonser_event == 14);
  CHECK(cyc.report.violations.empty());

  auto stale = aerodrome_check(fixtures::stale_edge_cycle());
  CHECK(stale.report.non_serializable);
  CHECK(stale.report.violations.empty());

  auto ok = aerodrome_check(parse_trace("t1 begin A\nt1 w x\nt1 end A\nt2 begin B\nt2 w y\nt2 end B"));
  CHECK_FALSE(ok.report.non_serializable);
}

TEST_CASE("aerodrome counters") {
  auto run = aerodrome_check(fixtures::nonincreasing_cycle());
  REQUIRE(run.counters.size() == 3);
  CHECK(run.counters[0].first == "end_events");
  CHECK(run.counters[0].second == 2);  // two regions end inside the fixture
  CHECK(run.counters[1].first == "memory_locations");
  CHECK(run.counters[1].second == 4);  // a b d c
  CHECK(run.counters[2].first == "locks");
  CHECK(run.counters[2].second == 0);
}

TEST_CASE("documented relations hold on the fixtures") {
  for (const Trace& trace :
       {fixtures::nonincreasing_cycle(), fixtures::stale_edge_cycle(),
        fixtures::increasing_cycle(), fixtures::symmetric_cycle()}) {
    auto c = differential::compare_trace(trace);
    CHECK(c.ok());
  }
  // And the two strictness witnesses exist among them.
  CHECK(differential::compare_trace(fixtures::stale_edge_cycle()).velodrome_strictly_smaller);
  CHECK(differential::compare_trace(fixtures::nonincreasing_cycle()).naive_strictly_larger);
}

namespace {

void expect_relations(const Trace& trace, std::uint64_t seed) {
  auto c = differential::compare_trace(trace);
  if (!c.ok()) {
    CAPTURE(seed);
    CAPTURE(serialize_trace(trace));
    for (const auto& r : c.failed_relations()) FAIL_CHECK(r);
  }
}

}  // namespace

TEST_CASE("documented relations hold on random traces") {
  GenConfig config;
  config.threads = 3;
  config.events = 14;
  config.variables = 2;
  config.locks = 1;
  for (std::uint64_t seed = 0; seed < 500; ++seed)
    expect_relations(generate_random(config, seed), seed);
}

TEST_CASE("documented relations hold on prefixes with open regions") {
  GenConfig config;
  config.threads = 4;
  config.events = 16;
  config.variables = 2;
  config.locks = 1;
  config.p_region = 0.7;
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    Trace trace = generate_random(config, seed);
    for (std::size_t cut : {trace.size() / 3, 2 * trace.size() / 3}) {
      Trace prefix;
      for (std::size_t i = 0; i < cut; ++i) {
        const Event& e = trace.events()[i];
        prefix.append(trace.thread_names()[static_cast<std::size_t>(e.thread)], e.op,
                      e.operand);
      }
      expect_relations(prefix, seed);
    }
  }
}

TEST_CASE("documented relations hold with more threads than the acceptance sweep") {
  GenConfig config;
  config.threads = 6;
  config.events = 24;
  config.variables = 3;
  config.locks = 2;
  for (std::uint64_t seed = 0; seed < 300; ++seed)
    expect_relations(generate_random(config, seed), seed);
}
