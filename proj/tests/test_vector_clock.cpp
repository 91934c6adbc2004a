#include <random>

#include "doctest.h"
#include "rtrack/vector_clock.hpp"

using rtrack::VectorClock;

namespace {

VectorClock random_clock(std::mt19937_64& rng, std::size_t max_len = 5,
                         rtrack::Timestamp max_val = 4) {
  VectorClock c;
  std::size_t len = rng() % (max_len + 1);
  for (std::size_t i = 0; i < len; ++i) c.set(i, rng() % (max_val + 1));
  return c;
}

}  // namespace

TEST_CASE("increment") {
  VectorClock a{0, 0};
  a.inc(0);
  CHECK(a.same(VectorClock{1, 0}));

  VectorClock b{1, 1, 0};
  b.inc(1);
  CHECK(b.same(VectorClock{1, 2, 0}));

  VectorClock c;
  c.inc(2);  // grows on demand
  CHECK(c.same(VectorClock{0, 0, 1}));
  CHECK(c.get(7) == 0);
}

TEST_CASE("increment overflow is a hard error") {
  VectorClock c;
  c.set(0, UINT64_MAX);
  CHECK_THROWS_AS(c.inc(0), std::overflow_error);
}

TEST_CASE("join") {
  CHECK(rtrack::join(VectorClock{1, 0, 0}, VectorClock{0, 1, 0}).same(VectorClock{1, 1, 0}));
  VectorClock c{3, 1, 4};
  CHECK(rtrack::join(c, c).same(c));
  CHECK(rtrack::join(VectorClock{2}, VectorClock{0, 3}).same(VectorClock{2, 3}));
}

TEST_CASE("leq") {
  CHECK(VectorClock{1, 0}.leq(VectorClock{1, 1}));
  CHECK_FALSE(VectorClock{1, 1}.leq(VectorClock{1, 0}));
  CHECK(VectorClock{0, 0}.leq(VectorClock{}));
  CHECK(VectorClock{}.leq(VectorClock{9, 9, 9}));
}

TEST_CASE("copies are independent") {
  VectorClock a{1, 2};
  VectorClock b = a;
  a.inc(0);
  CHECK(b.same(VectorClock{1, 2}));
  CHECK(a.same(VectorClock{2, 2}));
  VectorClock empty;
  CHECK(VectorClock(empty).same(VectorClock{}));
}

TEST_CASE("join is a least upper bound and leq a partial order") {
  std::mt19937_64 rng(42);
  for (int iter = 0; iter < 500; ++iter) {
    VectorClock a = random_clock(rng);
    VectorClock b = random_clock(rng);
    VectorClock c = random_clock(rng);

    CHECK(rtrack::join(a, b).same(rtrack::join(b, a)));
    CHECK(rtrack::join(rtrack::join(a, b), c).same(rtrack::join(a, rtrack::join(b, c))));
    CHECK(rtrack::join(a, a).same(a));

    CHECK(a.leq(rtrack::join(a, b)));
    CHECK(b.leq(rtrack::join(a, b)));
    // least: any upper bound dominates the join
    VectorClock ub = rtrack::join(rtrack::join(a, b), c);
    CHECK(rtrack::join(a, b).leq(ub));

    CHECK(a.leq(a));
    if (a.leq(b) && b.leq(a)) CHECK(a.same(b));
    if (a.leq(b) && b.leq(c)) CHECK(a.leq(c));
  }
}

TEST_CASE("inc strictly increases at exactly one index") {
  std::mt19937_64 rng(7);
  for (int iter = 0; iter < 200; ++iter) {
    VectorClock a = random_clock(rng);
    std::size_t t = rng() % 6;
    VectorClock b = a;
    b.inc(t);
    for (std::size_t i = 0; i < 8; ++i) {
      if (i == t)
        CHECK(b.get(i) == a.get(i) + 1);
      else
        CHECK(b.get(i) == a.get(i));
    }
  }
}
