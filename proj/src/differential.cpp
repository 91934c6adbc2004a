#include "rtrack/differential.hpp"

#include <algorithm>

#include "rtrack/analyzer.hpp"
#include "rtrack/comparators.hpp"
#include "rtrack/oracle.hpp"

namespace rtrack {
namespace differential {

namespace {

bool subset(const ViolationSet& a, const ViolationSet& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

EngineOutcome outcome(const Report& report) {
  return {report.non_serializable, report.violation_set()};
}

}  // namespace

std::vector<std::string> TraceComparison::failed_relations() const {
  std::vector<std::string> out;
  if (!full_violations_equal_oracle) out.push_back("full-violations != oracle");
  if (!full_verdict_equals_oracle) out.push_back("full-verdict != oracle");
  if (!atomicity_matches_full) out.push_back("atomicity-mode != full-mode violations");
  if (!trace_only_matches_full) out.push_back("trace-mode verdict != full-mode verdict");
  if (!velodrome_subset_of_full) out.push_back("velodrome not a subset of full");
  if (!full_subset_of_naive) out.push_back("full not a subset of naive-blame");
  if (!verdicts_agree) out.push_back("engine trace verdicts disagree");
  return out;
}

TraceComparison compare_trace(const Trace& trace) {
  TraceComparison c;
  c.full = outcome(analyze(trace, Mode::Full));
  c.atomicity = outcome(analyze(trace, Mode::AtomicityOnly));
  c.trace_only = outcome(analyze(trace, Mode::TraceOnly));
  c.velodrome = outcome(comparators::velodrome_check(trace).report);
  c.aerodrome = outcome(comparators::aerodrome_check(trace).report);
  c.naive = outcome(comparators::naive_blame_check(trace).report);
  c.oracle.non_serializable = oracle::nonserializable(trace);
  c.oracle.violations = oracle::violations(trace);

  c.full_violations_equal_oracle = c.full.violations == c.oracle.violations;
  c.full_verdict_equals_oracle = c.full.non_serializable == c.oracle.non_serializable;
  c.atomicity_matches_full = c.atomicity.violations == c.full.violations;
  c.trace_only_matches_full =
      c.trace_only.non_serializable == c.full.non_serializable;
  c.velodrome_subset_of_full = subset(c.velodrome.violations, c.full.violations);
  c.full_subset_of_naive = subset(c.full.violations, c.naive.violations);
  c.verdicts_agree = c.velodrome.non_serializable == c.full.non_serializable &&
                     c.aerodrome.non_serializable == c.full.non_serializable &&
                     c.naive.non_serializable == c.full.non_serializable;
  c.velodrome_strictly_smaller =
      c.velodrome_subset_of_full && c.velodrome.violations != c.full.violations;
  c.naive_strictly_larger =
      c.full_subset_of_naive && c.full.violations != c.naive.violations;
  return c;
}

}  // namespace differential
}  // namespace rtrack
