#ifndef RTRACK_REFINE_HPP
#define RTRACK_REFINE_HPP

#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "rtrack/report.hpp"
#include "rtrack/trace.hpp"

namespace rtrack {

// Drops the begin/end markers of the given labels; their member events fall
// out of any region and become unary transactions on re-analysis.
Trace demote_labels(const Trace& trace, const std::set<std::string>& labels);

struct RefineIteration {
  std::size_t number = 0;                   // 1-based
  std::uint64_t dynamic_violations = 0;     // violation records this trial
  std::vector<std::string> newly_excluded;  // labels added after this trial
};

struct RefineResult {
  std::vector<RefineIteration> iterations;
  std::set<std::string> excluded;
};

// Iterative specification refinement on a fixed trace: after each trial,
// labels with any reported violation leave the atomicity specification (their
// regions are demoted to unary transactions); stops after `threshold`
// consecutive trials with no new violation. `seed_excluded` pre-loads the
// exclusion set (labels already known to be non-atomic).
RefineResult refine(const Trace& trace,
                    const std::function<Report(const Trace&)>& engine,
                    std::size_t threshold = 2,
                    const std::set<std::string>& seed_excluded = {});

}  // namespace rtrack

#endif
