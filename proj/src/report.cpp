#include "rtrack/report.hpp"

#include <sstream>

#include "json.hpp"

namespace rtrack {

std::set<std::pair<int, std::uint64_t>> Report::violation_set() const {
  std::set<std::pair<int, std::uint64_t>> out;
  for (const auto& v : violations) out.emplace(v.thread, v.ordinal);
  return out;
}

std::string report_to_json(const Report& report, const Trace& trace,
                           const std::string& engine) {
  nlohmann::ordered_json j;
  if (!engine.empty()) j["engine"] = engine;
  j["non_serializable"] = report.non_serializable;
  if (report.first_nonser_event)
    j["first_nonser_event"] = *report.first_nonser_event;
  else
    j["first_nonser_event"] = nullptr;
  j["violations"] = nlohmann::ordered_json::array();
  for (const auto& v : report.violations) {
    nlohmann::ordered_json jv;
    jv["event"] = v.event;
    jv["thread"] = trace.thread_names()[static_cast<std::size_t>(v.thread)];
    jv["label"] = v.label;
    jv["ordinal"] = v.ordinal;
    jv["source_thread"] = trace.thread_names()[static_cast<std::size_t>(v.source_thread)];
    j["violations"].push_back(std::move(jv));
  }
  j["stats"] = {{"joins", report.stats.joins},
                {"subregions", report.stats.subregions},
                {"max_live_nodes", report.stats.max_live_nodes},
                {"transactions", report.stats.transactions}};
  return j.dump() + "\n";
}

std::string report_to_human(const Report& report, const Trace& trace,
                            const std::string& engine) {
  std::ostringstream out;
  if (!engine.empty()) out << "engine: " << engine << "\n";
  if (report.non_serializable)
    out << "verdict: non-serializable (first at event " << *report.first_nonser_event
        << ")\n";
  else
    out << "verdict: serializable\n";
  for (const auto& v : report.violations)
    out << "violation event=" << v.event << " thread="
        << trace.thread_names()[static_cast<std::size_t>(v.thread)] << " label=" << v.label
        << " ordinal=" << v.ordinal << " source="
        << trace.thread_names()[static_cast<std::size_t>(v.source_thread)] << "\n";
  out << "stats: joins=" << report.stats.joins << " subregions=" << report.stats.subregions
      << " max_live_nodes=" << report.stats.max_live_nodes
      << " transactions=" << report.stats.transactions << "\n";
  return out.str();
}

}  // namespace rtrack
