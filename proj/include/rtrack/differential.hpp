#ifndef RTRACK_DIFFERENTIAL_HPP
#define RTRACK_DIFFERENTIAL_HPP

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "rtrack/trace.hpp"
#include "rtrack/vector_clock.hpp"

namespace rtrack {
namespace differential {

using ViolationSet = std::set<std::pair<int, Timestamp>>;

struct EngineOutcome {
  bool non_serializable = false;
  ViolationSet violations;
};

/// Every engine and the oracle over one trace, with the documented relations
/// evaluated: full == oracle, mode coherence, the velodrome/full/naive-blame
/// containment chain, and all-engine verdict agreement.
struct TraceComparison {
  EngineOutcome full, atomicity, trace_only, velodrome, aerodrome, naive;
  EngineOutcome oracle;

  bool full_violations_equal_oracle = false;
  bool full_verdict_equals_oracle = false;
  bool atomicity_matches_full = false;
  bool trace_only_matches_full = false;
  bool velodrome_subset_of_full = false;
  bool full_subset_of_naive = false;
  bool verdicts_agree = false;

  // Strictness witnesses for the containment chain.
  bool velodrome_strictly_smaller = false;
  bool naive_strictly_larger = false;

  bool ok() const {
    return full_violations_equal_oracle && full_verdict_equals_oracle &&
           atomicity_matches_full && trace_only_matches_full &&
           velodrome_subset_of_full && full_subset_of_naive && verdicts_agree;
  }
  std::vector<std::string> failed_relations() const;
};

TraceComparison compare_trace(const Trace& trace);

}  // namespace differential
}  // namespace rtrack

#endif
