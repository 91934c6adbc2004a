#ifndef RTRACK_TESTS_FIXTURES_HPP
#define RTRACK_TESTS_FIXTURES_HPP

#include <string>

#include "rtrack/trace.hpp"

namespace fixtures {

// Three threads, five transactions, one cross-thread conflict per variable.
// The transactional HB cycle closes at the final read but is non-increasing,
// so the trace is non-serializable while every transaction stays serializable.
// Events of interest: the reads at indices 5, 7 and 14 trigger the joins.
inline std::string nonincreasing_cycle_text() {
  return "t1 begin A\n"
         "t1 w a\n"
         "t2 begin B\n"
         "t2 w b\n"
         "t2 r a\n"
         "t3 begin C\n"
         "t3 r b\n"
         "t3 w d\n"
         "t2 end B\n"
         "t2 begin D\n"
         "t3 end C\n"
         "t3 begin E\n"
         "t3 w c\n"
         "t1 r c\n";
}

// Same shape, but the third thread writes back to `a` (index 8). That second
// conflict on `a` makes thread t1's transaction genuinely non-serializable;
// a one-edge-per-pair graph has already used up the (B,C) pair and misses it.
inline std::string stale_edge_cycle_text() {
  return "t1 begin A\n"
         "t1 w a\n"
         "t2 begin B\n"
         "t2 w b\n"
         "t2 r a\n"
         "t3 begin C\n"
         "t3 r b\n"
         "t3 w a\n"
         "t2 end B\n"
         "t2 begin D\n"
         "t3 end C\n"
         "t3 begin E\n"
         "t3 w c\n"
         "t1 r c\n";
}

// Two threads, one increasing cycle: t1's transaction is interleaved by the
// conflicting writer and is blamed at the final read (index 7).
inline std::string increasing_cycle_text() {
  return "t1 begin A\n"
         "t1 w x\n"
         "t2 begin B\n"
         "t2 r x\n"
         "t2 w y\n"
         "t2 end B\n"
         "t1 r y\n";
}

// Two threads with symmetric write/read pairs: both transactions reach each
// other (non-serializable) but neither can be blamed (the cycle is
// non-increasing in both directions). Verdict triggers at index 6.
inline std::string symmetric_cycle_text() {
  return "t1 begin A\n"
         "t1 w x\n"
         "t2 begin B\n"
         "t2 w y\n"
         "t1 r y\n"
         "t2 r x\n";
}

inline rtrack::Trace nonincreasing_cycle() {
  return rtrack::parse_trace(nonincreasing_cycle_text());
}
inline rtrack::Trace stale_edge_cycle() {
  return rtrack::parse_trace(stale_edge_cycle_text());
}
inline rtrack::Trace increasing_cycle() {
  return rtrack::parse_trace(increasing_cycle_text());
}
inline rtrack::Trace symmetric_cycle() {
  return rtrack::parse_trace(symmetric_cycle_text());
}

}  // namespace fixtures

#endif
