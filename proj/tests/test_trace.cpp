#include "doctest.h"
#include "rtrack/gen.hpp"
#include "rtrack/trace.hpp"
#include "support/fixtures.hpp"

using rtrack::Op;
using rtrack::parse_trace;
using rtrack::serialize_trace;
using rtrack::Trace;

TEST_CASE("parse a minimal well-formed trace") {
  Trace t = parse_trace("t1 begin A\nt1 w x\nt1 end A");
  REQUIRE(t.size() == 3);
  CHECK(t.thread_count() == 1);
  CHECK(t.events()[0].op == Op::Begin);
  CHECK(t.events()[0].operand == "A");
  CHECK(t.events()[1].op == Op::Write);
  CHECK(t.events()[1].index == 2);
  CHECK(t.events()[2].op == Op::End);
}

TEST_CASE("parse the three-thread cycle fixture") {
  Trace t = fixtures::nonincreasing_cycle();
  CHECK(t.size() == 14);
  CHECK(t.thread_count() == 3);
  CHECK(t.thread_names() == std::vector<std::string>{"t1", "t2", "t3"});
}

TEST_CASE("comments, blank lines and tabs") {
  Trace t = parse_trace("# header\n\nt1\tw\tx\n  t2 r x # trailing\n\n");
  REQUIRE(t.size() == 2);
  CHECK(t.events()[0].thread == 0);
  CHECK(t.events()[1].op == Op::Read);
}

TEST_CASE("parse rejections carry the line number") {
  CHECK_THROWS_WITH_AS(parse_trace("t1 frobnicate x"),
                       "line 1: unknown op token `frobnicate`", rtrack::ParseError);
  CHECK_THROWS_AS(parse_trace("t1 w x\nt1 w"), rtrack::ParseError);
  CHECK_THROWS_AS(parse_trace("t1 w x y"), rtrack::ParseError);
  CHECK_THROWS_AS(parse_trace("t1 w x@"), rtrack::ParseError);
  try {
    parse_trace("t1 w x\nboom");
  } catch (const rtrack::ParseError& e) {
    CHECK(e.line == 2);
  }
}

TEST_CASE("validate flat-region rules") {
  // The cycle fixture ends with three regions still running: warnings only.
  auto fixture_issues = rtrack::validate(fixtures::nonincreasing_cycle());
  CHECK(fixture_issues.size() == 3);
  CHECK(rtrack::passes_validation(fixture_issues));
  CHECK(rtrack::validate(parse_trace("t1 begin A\nt1 w x\nt1 end A")).empty());

  auto nested = rtrack::validate(parse_trace("t1 begin A\nt1 begin B"));
  REQUIRE(nested.size() == 2);  // nested begin + the unclosed A warning
  CHECK(nested[0].rule == rtrack::StructuralViolation::Rule::NestedBegin);
  CHECK(nested[0].index == 2);
  CHECK_FALSE(nested[0].warning);

  auto dangling = rtrack::validate(parse_trace("t1 end A"));
  REQUIRE(dangling.size() == 1);
  CHECK(dangling[0].rule == rtrack::StructuralViolation::Rule::EndWithoutBegin);
  CHECK(dangling[0].index == 1);

  auto mismatch = rtrack::validate(parse_trace("t1 begin A\nt1 end B"));
  REQUIRE(mismatch.size() == 1);
  CHECK(mismatch[0].rule == rtrack::StructuralViolation::Rule::EndLabelMismatch);

  auto open = rtrack::validate(parse_trace("t1 begin A\nt1 w x"));
  REQUIRE(open.size() == 1);
  CHECK(open[0].rule == rtrack::StructuralViolation::Rule::UnclosedRegion);
  CHECK(open[0].warning);
  CHECK(rtrack::passes_validation(open));
}

TEST_CASE("serialize round-trips") {
  CHECK(serialize_trace(Trace{}).empty());
  CHECK(parse_trace("") == Trace{});

  Trace t = fixtures::nonincreasing_cycle();
  CHECK(parse_trace(serialize_trace(t)) == t);

  rtrack::GenConfig config;
  config.threads = 3;
  config.events = 25;
  config.variables = 3;
  config.locks = 1;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Trace g = rtrack::generate_random(config, seed);
    CHECK(parse_trace(serialize_trace(g)) == g);
  }
}

TEST_CASE("thread indices follow first appearance") {
  Trace t = parse_trace("zeta w x\nalpha r x\nzeta w y\nmid r y");
  CHECK(t.thread_names() == std::vector<std::string>{"zeta", "alpha", "mid"});
  CHECK(t.thread_index("alpha") == 1);
  CHECK(t.thread_index("nope") == -1);
  CHECK(t.events()[2].thread == 0);
}
