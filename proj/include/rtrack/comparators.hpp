#ifndef RTRACK_COMPARATORS_HPP
#define RTRACK_COMPARATORS_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rtrack/report.hpp"
#include "rtrack/trace.hpp"

namespace rtrack {
namespace comparators {

struct EngineResult {
  Report report;
  // Engine-specific runtime counters, in print order (for the stats command).
  std::vector<std::pair<std::string, std::uint64_t>> counters;
};

// One-edge-per-ordered-pair transactional HB graph with head/tail event
// timestamps; blames the cycle-completing transaction only when the located
// cycle is increasing. Misses violations whose evidence was suppressed by the
// keep-first edge policy.
EngineResult velodrome_check(const Trace& trace);

// Event-level clock tracking plus the end-of-transaction traversal that
// abstracts happens-before into transactional happens-before. Trace verdict
// only; never reports violations.
EngineResult aerodrome_check(const Trace& trace);

// Exact event-lifted THB graph (every edge kept); blames whichever
// transaction completes a cycle. Complete but unsound: a superset of the
// genuinely violated transactions.
EngineResult naive_blame_check(const Trace& trace);

}  // namespace comparators
}  // namespace rtrack

#endif
