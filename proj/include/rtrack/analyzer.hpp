#ifndef RTRACK_ANALYZER_HPP
#define RTRACK_ANALYZER_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "rtrack/report.hpp"
#include "rtrack/trace.hpp"
#include "rtrack/vector_clock.hpp"

namespace rtrack {

enum class Mode { AtomicityOnly, TraceOnly, Full };

const char* mode_name(Mode mode);

struct TraceError : std::runtime_error {
  TraceError(std::size_t index, const std::string& what)
      : std::runtime_error("event " + std::to_string(index) + ": " + what),
        index(index) {}
  std::size_t index;
};

/// Optional instrumentation sink. Event clocks and TVC snapshots are what the
/// differential and trajectory tests look at; production runs leave this off.
struct AnalyzerDebug {
  bool record_event_clocks = false;
  bool record_tvc = false;

  // V(e) for each event, in trace order (the thread's clock right after the
  // event was processed).
  std::vector<VectorClock> event_clocks;

  enum class TvcPhase { DirectUpdate, EventDone };
  struct TvcSnapshot {
    std::size_t event;
    TvcPhase phase;
    int thread;
    VectorClock tvc;
  };
  std::vector<TvcSnapshot> tvc_log;

  struct TxRecord {
    int thread;
    Timestamp ordinal;
    std::string label;
    std::size_t begin_event;  // begin index; for unary, the event itself
    VectorClock begin_clock;
    bool unary;
  };
  std::vector<TxRecord> transactions;

  // Filled in after the run.
  std::uint64_t checkhb_calls = 0;
  std::uint64_t checkhb_max_comparisons = 0;
  std::uint64_t max_back_visits = 0;     // per top-level back-propagation tree
  std::uint64_t max_forward_visits = 0;  // per forward-propagation tree
};

/// Online checker state machine. Feed events in trace order; every value it
/// keeps is derived from the events seen so far, so prefixes are first-class.
class Analyzer {
 public:
  explicit Analyzer(Mode mode, std::size_t thread_hint = 0,
                    AnalyzerDebug* debug = nullptr);
  ~Analyzer();
  Analyzer(const Analyzer&) = delete;
  Analyzer& operator=(const Analyzer&) = delete;
  Analyzer(Analyzer&&) = default;

  void on_event(const Event& e);  // throws TraceError on structural misuse
  const Report& report() const { return report_; }
  Report take_report();

  std::uint64_t checkhb_calls() const { return checkhb_calls_; }
  std::uint64_t checkhb_max_comparisons() const { return checkhb_cmp_max_; }
  std::uint64_t live_nodes() const { return live_nodes_; }

  // State introspection for invariant tests: the running transaction's
  // ordinal (= its begin stamp) and the thread's transactional vector clock.
  std::optional<Timestamp> running_ordinal(int t) const;
  const VectorClock* thread_tvc(int t) const;  // null without TVC tracking

 private:
  using ClockRef = std::shared_ptr<const VectorClock>;

  struct TxNode {
    std::string label;
    int thread;
    Timestamp ordinal;
    ClockRef begin_clock;
    ClockRef curr_clock;
    // Cached TV(t)[t] == V(C(t).begin)[t]; kept fresh wherever TV(t)[t] is
    // written so checkHB stays at two timestamp comparisons.
    bool tvc_current = false;
    std::set<ClockRef> reported_sources;
  };

  struct AccessRef {
    ClockRef clock;  // null = unset
    int thread = -1;
  };

  void ensure_thread(int t);
  int var_id(const std::string& name);
  int lock_id(const std::string& name);
  ClockRef& read_slot(int var, int t);

  void handle_begin(int t, const std::string& label, std::size_t idx, bool unary);
  void handle_end(int t);
  void handle_read(int t, const std::string& var, std::size_t idx);
  void handle_write(int t, const std::string& var, std::size_t idx);
  void handle_acquire(int t, const std::string& lock, std::size_t idx);
  void handle_release(int t, const std::string& lock);

  void sub_region(int t);
  void do_join(const ClockRef& source, int source_thread, int t, std::size_t idx);
  void check_hb(int t, const VectorClock& source, const ClockRef& source_ref,
                int source_thread, std::size_t idx);
  void update_tvc(const VectorClock& source_clock, int source_thread, int t,
                  std::size_t idx);
  void forward_propagate(std::vector<char>& working, int t1, int t2,
                         std::uint64_t& visits);
  void back_propagate(std::vector<char>& working, int t1, int t2,
                      Timestamp source, Timestamp sink, std::uint64_t& visits);
  std::vector<char> full_thread_set() const;

  void latch_nonser(std::size_t idx);
  void record_violation(int t, int source_thread, const ClockRef& source_ref,
                        std::size_t idx);

  Mode mode_;
  std::size_t nthreads_ = 0;
  std::vector<VectorClock> clocks_;              // V(t)
  std::vector<VectorClock> tvc_;                 // TV(t); unused in AtomicityOnly
  std::vector<std::unique_ptr<TxNode>> current_; // C(t)
  std::unordered_map<std::string, int> var_ids_;
  std::unordered_map<std::string, int> lock_ids_;
  std::vector<AccessRef> last_write_;            // W(x)
  std::vector<std::vector<ClockRef>> last_read_; // R(t,x), indexed [x][t]
  std::vector<int> read_count_;                  // # of set R(.,x) per x
  std::vector<AccessRef> last_release_;          // L(m)

  Report report_;
  std::uint64_t live_nodes_ = 0;
  std::uint64_t checkhb_calls_ = 0;
  std::uint64_t checkhb_cmp_max_ = 0;
  AnalyzerDebug* debug_;
};

struct AnalyzeOptions {
  std::size_t thread_hint = 0;
  AnalyzerDebug* debug = nullptr;
};

// Runs the whole trace through an Analyzer. Deterministic: identical input
// yields an identical Report.
Report analyze(const Trace& trace, Mode mode, const AnalyzeOptions& options = {});

}  // namespace rtrack

#endif
