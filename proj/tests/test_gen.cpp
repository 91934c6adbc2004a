#include "doctest.h"
#include "rtrack/gen.hpp"
#include "rtrack/trace.hpp"

using rtrack::GenConfig;
using rtrack::generate_random;

TEST_CASE("zero payload events yields an empty trace") {
  GenConfig config;
  config.events = 0;
  CHECK(generate_random(config, 123).empty());
}

TEST_CASE("deterministic for a fixed config and seed") {
  GenConfig config;
  config.threads = 4;
  config.events = 30;
  config.variables = 3;
  config.locks = 2;
  CHECK(generate_random(config, 9) == generate_random(config, 9));
  CHECK_FALSE(generate_random(config, 9) == generate_random(config, 10));
}

TEST_CASE("every generated trace validates cleanly") {
  GenConfig config;
  config.threads = 4;
  config.events = 12;
  config.variables = 3;
  config.locks = 1;
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    auto trace = generate_random(config, seed);
    auto issues = rtrack::validate(trace);
    CHECK(issues.empty());  // closed regions: not even warnings
  }
}

TEST_CASE("no lock ops when the config has no locks") {
  GenConfig config;
  config.threads = 2;
  config.events = 40;
  config.locks = 0;
  config.w_acquire = 5.0;  // ignored without locks
  auto trace = generate_random(config, 3);
  for (const auto& e : trace.events()) CHECK_FALSE(e.is_sync());
}

TEST_CASE("bad configs are rejected") {
  GenConfig config;
  config.threads = 1;
  CHECK_THROWS_AS(generate_random(config, 0), std::invalid_argument);
  config.threads = 2;
  config.p_region = 1.5;
  CHECK_THROWS_AS(generate_random(config, 0), std::invalid_argument);
  config.p_region = 0.5;
  config.w_read = config.w_write = config.w_acquire = config.w_release = 0.0;
  CHECK_THROWS_AS(generate_random(config, 0), std::invalid_argument);
}
