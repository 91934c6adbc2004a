#include "rtrack/refine.hpp"

#include <algorithm>

namespace rtrack {

Trace demote_labels(const Trace& trace, const std::set<std::string>& labels) {
  Trace out;
  for (const Event& e : trace.events()) {
    if (e.is_marker() && labels.count(e.operand)) continue;
    out.append(trace.thread_names()[static_cast<std::size_t>(e.thread)], e.op, e.operand);
  }
  return out;
}

RefineResult refine(const Trace& trace,
                    const std::function<Report(const Trace&)>& engine,
                    std::size_t threshold,
                    const std::set<std::string>& seed_excluded) {
  RefineResult result;
  result.excluded = seed_excluded;
  if (threshold == 0) threshold = 1;
  std::size_t consecutive_clean = 0;
  while (consecutive_clean < threshold) {
    Trace trial = result.excluded.empty() ? trace : demote_labels(trace, result.excluded);
    Report report = engine(trial);

    RefineIteration iter;
    iter.number = result.iterations.size() + 1;
    iter.dynamic_violations = report.violations.size();
    std::set<std::string> fresh;
    for (const auto& v : report.violations)
      if (!result.excluded.count(v.label)) fresh.insert(v.label);
    iter.newly_excluded.assign(fresh.begin(), fresh.end());
    result.iterations.push_back(iter);

    if (fresh.empty()) {
      ++consecutive_clean;
    } else {
      consecutive_clean = 0;
      result.excluded.insert(fresh.begin(), fresh.end());
    }
  }
  return result;
}

}  // namespace rtrack
