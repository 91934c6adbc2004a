#ifndef RTRACK_REPORT_HPP
#define RTRACK_REPORT_HPP

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "rtrack/trace.hpp"

namespace rtrack {

struct ViolationRecord {
  std::size_t event = 0;       // trace index of the triggering event
  int thread = 0;              // thread owning the violated transaction
  std::string label;           // region label of the violated transaction
  std::uint64_t ordinal = 0;   // per-thread transaction counter
  int source_thread = 0;       // thread of the conflicting source event
};

struct ReportStats {
  std::uint64_t joins = 0;
  std::uint64_t subregions = 0;
  std::uint64_t max_live_nodes = 0;
  std::uint64_t transactions = 0;
};

/// Trace verdict plus the list of violated transactions. A non-empty
/// violations list implies non_serializable.
struct Report {
  bool non_serializable = false;
  std::optional<std::size_t> first_nonser_event;
  std::vector<ViolationRecord> violations;
  ReportStats stats;

  // Violations as a set of (thread, ordinal) pairs, the currency the
  // engine/oracle/comparator equivalences are stated in.
  std::set<std::pair<int, std::uint64_t>> violation_set() const;
};

// Fixed field order, base-10 integers; byte-deterministic for a fixed input.
// `engine` is prepended when non-empty (comparator reports).
std::string report_to_json(const Report& report, const Trace& trace,
                           const std::string& engine = "");
std::string report_to_human(const Report& report, const Trace& trace,
                            const std::string& engine = "");

}  // namespace rtrack

#endif
