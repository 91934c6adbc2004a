#include "rtrack/comparators.hpp"

#include <algorithm>
#include <memory>
#include <optional>
#include <unordered_map>
#include <unordered_set>

#include "rtrack/analyzer.hpp"
#include "rtrack/vector_clock.hpp"

namespace rtrack {
namespace comparators {

namespace {

constexpr const char* kUnaryLabel = "<unary>";

void latch(Report& report, std::size_t idx) {
  if (!report.non_serializable) {
    report.non_serializable = true;
    report.first_nonser_event = idx;
  }
}

// ---------------------------------------------------------------------------
// Velodrome-style checker.

struct VeloEdge {
  std::size_t head_ts;  // event index at the source transaction
  std::size_t tail_ts;  // event index at the sink transaction
};

struct VeloNode {
  int thread;
  Timestamp ordinal;
  std::string label;
  bool dead = false;
  std::unordered_map<VeloNode*, VeloEdge> out;
};

class Velodrome {
 public:
  explicit Velodrome(const Trace& trace) : trace_(trace) {}

  EngineResult run() {
    for (const Event& e : trace_.events()) on_event(e);
    result_.report.stats.transactions = tx_count_;
    result_.report.stats.max_live_nodes = max_live_;
    result_.report.stats.joins = edges_added_;
    result_.counters = {{"transactions", tx_count_},
                        {"cross_thread_edges", edges_added_},
                        {"max_live_nodes", max_live_}};
    return std::move(result_);
  }

 private:
  struct AccessRef {
    VeloNode* node = nullptr;
    std::size_t index = 0;
    int thread = -1;
  };

  void ensure_thread(int t) {
    auto n = static_cast<std::size_t>(t) + 1;
    if (current_.size() < n) {
      current_.resize(n, nullptr);
      prev_.resize(n, nullptr);
      ordinal_.resize(n, 0);
      last_index_.resize(n, 0);
    }
  }

  VeloNode* begin_tx(int t, const std::string& label, std::size_t idx) {
    auto node = std::make_unique<VeloNode>();
    node->thread = t;
    node->ordinal = ++ordinal_[static_cast<std::size_t>(t)];
    node->label = label;
    VeloNode* raw = node.get();
    nodes_.push_back(std::move(node));
    ++tx_count_;
    ++live_;
    max_live_ = std::max(max_live_, live_);
    if (VeloNode* p = prev_[static_cast<std::size_t>(t)]) {
      // Program-order edge; its endpoints bracket the two transactions, so it
      // can never break an increasing sequence.
      p->out.try_emplace(raw, VeloEdge{last_index_[static_cast<std::size_t>(t)], idx});
    }
    current_[static_cast<std::size_t>(t)] = raw;
    return raw;
  }

  void end_tx(int t, std::size_t idx) {
    auto ut = static_cast<std::size_t>(t);
    prev_[ut] = current_[ut];
    last_index_[ut] = idx;
    current_[ut] = nullptr;
    prune();
  }

  void add_edge(VeloNode* from, std::size_t head_ts, VeloNode* into, std::size_t idx) {
    if (from == into) return;
    auto [it, inserted] = from->out.try_emplace(into, VeloEdge{head_ts, idx});
    if (!inserted) return;  // keep-first: an edge for this pair already exists
    ++edges_added_;
    if (!result_.report.non_serializable && reaches(into, from)) latch(result_.report, idx);
    if (result_.report.non_serializable && increasing_cycle(into, from, head_ts)) {
      result_.report.violations.push_back(
          {idx, into->thread, into->label, into->ordinal, from->thread});
    }
  }

  bool reaches(VeloNode* from, VeloNode* target) {
    std::unordered_set<VeloNode*> seen;
    std::vector<VeloNode*> stack{from};
    while (!stack.empty()) {
      VeloNode* n = stack.back();
      stack.pop_back();
      if (n == target) return true;
      if (!seen.insert(n).second) continue;
      for (auto& [m, edge] : n->out) stack.push_back(m);
    }
    return false;
  }

  // Looks for a path cur -> ... -> source whose recorded timestamps are
  // non-decreasing through every intermediate node, closing with the new edge
  // whose head event is `new_head`. Memoizes the smallest arrival timestamp
  // per node.
  bool increasing_cycle(VeloNode* cur, VeloNode* source, std::size_t new_head) {
    std::unordered_map<VeloNode*, std::size_t> best;
    std::vector<std::pair<VeloNode*, std::size_t>> stack;
    for (auto& [m, edge] : cur->out) stack.emplace_back(m, edge.tail_ts);
    while (!stack.empty()) {
      auto [n, arrived] = stack.back();
      stack.pop_back();
      auto it = best.find(n);
      if (it != best.end() && it->second <= arrived) continue;
      best[n] = arrived;
      if (n == source && arrived <= new_head) return true;
      for (auto& [m, edge] : n->out)
        if (edge.head_ts >= arrived) stack.emplace_back(m, edge.tail_ts);
    }
    return false;
  }

  // Nodes unreachable from any current/previous transaction or last-access
  // reference can never join a future cycle; drop their edges.
  void prune() {
    std::unordered_set<VeloNode*> mark;
    std::vector<VeloNode*> stack;
    auto root = [&](VeloNode* n) {
      if (n && mark.insert(n).second) stack.push_back(n);
    };
    for (VeloNode* n : current_) root(n);
    for (VeloNode* n : prev_) root(n);
    for (auto& [name, ref] : last_write_) root(ref.node);
    for (auto& [name, slots] : last_read_)
      for (auto& ref : slots) root(ref.node);
    for (auto& [name, ref] : last_release_) root(ref.node);
    while (!stack.empty()) {
      VeloNode* n = stack.back();
      stack.pop_back();
      for (auto& [m, edge] : n->out) root(m);
    }
    for (auto& n : nodes_) {
      if (!n->dead && !mark.count(n.get())) {
        n->dead = true;
        n->out.clear();
        --live_;
      }
    }
  }

  void on_event(const Event& e) {
    ensure_thread(e.thread);
    const int t = e.thread;
    auto ut = static_cast<std::size_t>(t);
    switch (e.op) {
      case Op::Begin:
        if (current_[ut]) throw TraceError(e.index, "begin while a region is open");
        begin_tx(t, e.operand, e.index);
        return;
      case Op::End:
        if (!current_[ut]) throw TraceError(e.index, "end without a begin");
        if (current_[ut]->label != e.operand)
          throw TraceError(e.index, "end label does not match open begin");
        end_tx(t, e.index);
        return;
      default:
        break;
    }
    const bool unary = current_[ut] == nullptr;
    if (unary) begin_tx(t, kUnaryLabel, e.index);
    VeloNode* cur = current_[ut];
    switch (e.op) {
      case Op::Read: {
        auto& w = last_write_[e.operand];
        if (w.node && w.thread != t) add_edge(w.node, w.index, cur, e.index);
        auto& slots = last_read_[e.operand];
        if (slots.size() <= ut) slots.resize(ut + 1);
        slots[ut] = {cur, e.index, t};
        break;
      }
      case Op::Write: {
        auto& slots = last_read_[e.operand];
        bool any_read = false;
        for (auto& ref : slots) any_read = any_read || ref.node != nullptr;
        if (any_read) {
          for (auto& ref : slots)
            if (ref.node && ref.thread != t) add_edge(ref.node, ref.index, cur, e.index);
        } else {
          auto& w = last_write_[e.operand];
          if (w.node && w.thread != t) add_edge(w.node, w.index, cur, e.index);
        }
        last_write_[e.operand] = {cur, e.index, t};
        for (auto& ref : slots) ref = {};
        break;
      }
      case Op::Acquire: {
        auto& rel = last_release_[e.operand];
        if (rel.node && rel.thread != t) add_edge(rel.node, rel.index, cur, e.index);
        break;
      }
      case Op::Release:
        last_release_[e.operand] = {cur, e.index, t};
        break;
      default:
        break;
    }
    if (unary) end_tx(t, e.index);
  }

  const Trace& trace_;
  EngineResult result_;
  std::vector<std::unique_ptr<VeloNode>> nodes_;
  std::vector<VeloNode*> current_;
  std::vector<VeloNode*> prev_;
  std::vector<Timestamp> ordinal_;
  std::vector<std::size_t> last_index_;
  std::unordered_map<std::string, AccessRef> last_write_;
  std::unordered_map<std::string, std::vector<AccessRef>> last_read_;
  std::unordered_map<std::string, AccessRef> last_release_;
  std::uint64_t tx_count_ = 0;
  std::uint64_t edges_added_ = 0;
  std::uint64_t live_ = 0;
  std::uint64_t max_live_ = 0;
};

// ---------------------------------------------------------------------------
// Naive cycle-completing-blame checker over the exact event-lifted THB graph.

struct NaiveNode {
  int thread;
  Timestamp ordinal;
  std::string label;
  std::unordered_set<NaiveNode*> out;
};

class NaiveBlame {
 public:
  explicit NaiveBlame(const Trace& trace) : trace_(trace) {}

  EngineResult run() {
    for (const Event& e : trace_.events()) on_event(e);
    result_.report.stats.transactions = tx_count_;
    result_.report.stats.max_live_nodes = tx_count_;  // nothing is ever discarded
    result_.report.stats.joins = edges_;
    result_.counters = {{"transactions", tx_count_},
                        {"cross_thread_edges", edges_},
                        {"retained_nodes", tx_count_}};
    return std::move(result_);
  }

 private:
  struct AccessRef {
    NaiveNode* node = nullptr;
    std::size_t index = 0;
    int thread = -1;
  };

  void ensure_thread(int t) {
    auto n = static_cast<std::size_t>(t) + 1;
    if (current_.size() < n) {
      current_.resize(n, nullptr);
      prev_.resize(n, nullptr);
      ordinal_.resize(n, 0);
    }
  }

  NaiveNode* begin_tx(int t, const std::string& label) {
    auto node = std::make_unique<NaiveNode>();
    node->thread = t;
    node->ordinal = ++ordinal_[static_cast<std::size_t>(t)];
    node->label = label;
    NaiveNode* raw = node.get();
    nodes_.push_back(std::move(node));
    ++tx_count_;
    if (NaiveNode* p = prev_[static_cast<std::size_t>(t)]) p->out.insert(raw);
    current_[static_cast<std::size_t>(t)] = raw;
    return raw;
  }

  void end_tx(int t) {
    prev_[static_cast<std::size_t>(t)] = current_[static_cast<std::size_t>(t)];
    current_[static_cast<std::size_t>(t)] = nullptr;
  }

  bool reaches(NaiveNode* from, NaiveNode* target) {
    std::unordered_set<NaiveNode*> seen;
    std::vector<NaiveNode*> stack{from};
    while (!stack.empty()) {
      NaiveNode* n = stack.back();
      stack.pop_back();
      if (n == target) return true;
      if (!seen.insert(n).second) continue;
      for (NaiveNode* m : n->out) stack.push_back(m);
    }
    return false;
  }

  void add_edge(NaiveNode* from, std::size_t head_idx, NaiveNode* into, std::size_t idx) {
    if (from == into) return;
    ++edges_;
    from->out.insert(into);
    if (reaches(into, from)) {
      latch(result_.report, idx);
      // The transaction containing the completing event takes the blame.
      if (blamed_.insert({into, head_idx}).second)
        result_.report.violations.push_back(
            {idx, into->thread, into->label, into->ordinal, from->thread});
    }
  }

  void on_event(const Event& e) {
    ensure_thread(e.thread);
    const int t = e.thread;
    auto ut = static_cast<std::size_t>(t);
    switch (e.op) {
      case Op::Begin:
        if (current_[ut]) throw TraceError(e.index, "begin while a region is open");
        begin_tx(t, e.operand);
        return;
      case Op::End:
        if (!current_[ut]) throw TraceError(e.index, "end without a begin");
        if (current_[ut]->label != e.operand)
          throw TraceError(e.index, "end label does not match open begin");
        end_tx(t);
        return;
      default:
        break;
    }
    const bool unary = current_[ut] == nullptr;
    if (unary) begin_tx(t, kUnaryLabel);
    NaiveNode* cur = current_[ut];
    switch (e.op) {
      case Op::Read: {
        auto& w = last_write_[e.operand];
        if (w.node && w.thread != t) add_edge(w.node, w.index, cur, e.index);
        auto& slots = last_read_[e.operand];
        if (slots.size() <= ut) slots.resize(ut + 1);
        slots[ut] = {cur, e.index, t};
        break;
      }
      case Op::Write: {
        auto& slots = last_read_[e.operand];
        for (auto& ref : slots)
          if (ref.node && ref.thread != t) add_edge(ref.node, ref.index, cur, e.index);
        auto& w = last_write_[e.operand];
        if (w.node && w.thread != t) add_edge(w.node, w.index, cur, e.index);
        last_write_[e.operand] = {cur, e.index, t};
        for (auto& ref : slots) ref = {};
        break;
      }
      case Op::Acquire: {
        auto& rel = last_release_[e.operand];
        if (rel.node && rel.thread != t) add_edge(rel.node, rel.index, cur, e.index);
        break;
      }
      case Op::Release:
        last_release_[e.operand] = {cur, e.index, t};
        break;
      default:
        break;
    }
    if (unary) end_tx(t);
  }

  struct PairHash {
    std::size_t operator()(const std::pair<NaiveNode*, std::size_t>& p) const {
      return std::hash<NaiveNode*>()(p.first) ^ (p.second * 0x9e3779b97f4a7c15ull);
    }
  };

  const Trace& trace_;
  EngineResult result_;
  std::vector<std::unique_ptr<NaiveNode>> nodes_;
  std::vector<NaiveNode*> current_;
  std::vector<NaiveNode*> prev_;
  std::vector<Timestamp> ordinal_;
  std::unordered_map<std::string, AccessRef> last_write_;
  std::unordered_map<std::string, std::vector<AccessRef>> last_read_;
  std::unordered_map<std::string, AccessRef> last_release_;
  std::unordered_set<std::pair<NaiveNode*, std::size_t>, PairHash> blamed_;
  std::uint64_t tx_count_ = 0;
  std::uint64_t edges_ = 0;
};

// ---------------------------------------------------------------------------
// AeroDrome-style trace-verdict checker.

class Aerodrome {
 public:
  explicit Aerodrome(const Trace& trace) : trace_(trace) {}

  EngineResult run() {
    for (const Event& e : trace_.events()) on_event(e);
    result_.report.stats.transactions = tx_count_;
    result_.report.stats.joins = joins_;
    result_.report.stats.max_live_nodes = max_open_;
    result_.counters = {{"end_events", end_events_},
                        {"memory_locations", static_cast<std::uint64_t>(var_order_.size())},
                        {"locks", static_cast<std::uint64_t>(lock_order_.size())}};
    return std::move(result_);
  }

 private:
  struct Entity {
    VectorClock clock;
    int thread = -1;
    Timestamp tx_ordinal = 0;
    bool set = false;
  };

  void ensure_thread(int t) {
    auto n = static_cast<std::size_t>(t) + 1;
    if (clocks_.size() < n) {
      clocks_.resize(n);
      begin_.resize(n);
      open_.resize(n, 0);
      open_label_.resize(n);
      ordinal_.resize(n, 0);
    }
    if (!seen_thread_[t]) {
      seen_thread_[t] = true;
      thread_order_.push_back(t);
    }
  }

  // A dependency on a still-running transaction is a dependency on that
  // transaction's whole prefix, so the join pulls the source thread's current
  // clock; a finished access keeps its (end-traversal enriched) snapshot.
  const VectorClock& source_of(const Entity& e) const {
    auto u = static_cast<std::size_t>(e.thread);
    if (open_[u] && ordinal_[u] == e.tx_ordinal) return clocks_[u];
    return e.clock;
  }

  // A cross-thread join into thread t's running transaction: the source
  // already carries a forward relation here, so finding the running begin
  // inside it closes a mutual-reachability cycle.
  void join_into(int t, const VectorClock& source, std::size_t idx) {
    ++joins_;
    if (begin_[static_cast<std::size_t>(t)].leq(source)) latch(result_.report, idx);
    clocks_[static_cast<std::size_t>(t)].join(source);
  }

  void begin_tx(int t, const std::string& label) {
    auto ut = static_cast<std::size_t>(t);
    clocks_[ut].inc(ut);
    begin_[ut] = clocks_[ut];
    open_[ut] = 1;
    open_label_[ut] = label;
    ++ordinal_[ut];
    ++tx_count_;
    std::uint64_t open_now = 0;
    for (char o : open_) open_now += static_cast<std::uint64_t>(o);
    max_open_ = std::max(max_open_, open_now);
  }

  void end_tx(int t, std::size_t idx) {
    auto ut = static_cast<std::size_t>(t);
    ++end_events_;
    const VectorClock& mine = clocks_[ut];
    const VectorClock& b = begin_[ut];
    // Abstract the finished transaction's orderings into every entity that
    // already saw its beginning: threads, then variables, then locks, in
    // first-appearance order.
    for (int u : thread_order_) {
      if (u == t) continue;
      auto uu = static_cast<std::size_t>(u);
      if (b.leq(clocks_[uu])) {
        if (open_[uu] && begin_[uu].leq(mine)) latch(result_.report, idx);
        clocks_[uu].join(mine);
      }
    }
    for (const std::string& x : var_order_) {
      Entity& w = writes_[x];
      if (w.set && b.leq(w.clock)) w.clock.join(mine);
      auto& slots = reads_[x];
      for (Entity& r : slots)
        if (r.set && b.leq(r.clock)) r.clock.join(mine);
    }
    for (const std::string& m : lock_order_) {
      Entity& l = releases_[m];
      if (l.set && b.leq(l.clock)) l.clock.join(mine);
    }
    open_[ut] = 0;
  }

  void touch_var(const std::string& name) {
    if (!writes_.count(name)) {
      writes_[name] = {};
      reads_[name] = {};
      var_order_.push_back(name);
    }
  }

  void touch_lock(const std::string& name) {
    if (!releases_.count(name)) {
      releases_[name] = {};
      lock_order_.push_back(name);
    }
  }

  void on_event(const Event& e) {
    ensure_thread(e.thread);
    const int t = e.thread;
    auto ut = static_cast<std::size_t>(t);
    switch (e.op) {
      case Op::Begin:
        if (open_[ut]) throw TraceError(e.index, "begin while a region is open");
        begin_tx(t, e.operand);
        return;
      case Op::End:
        if (!open_[ut]) throw TraceError(e.index, "end without a begin");
        if (open_label_[ut] != e.operand)
          throw TraceError(e.index, "end label does not match open begin");
        end_tx(t, e.index);
        return;
      default:
        break;
    }
    const bool unary = !open_[ut];
    if (unary) begin_tx(t, kUnaryLabel);
    switch (e.op) {
      case Op::Read: {
        touch_var(e.operand);
        Entity& w = writes_[e.operand];
        auto& slots = reads_[e.operand];
        if (slots.size() <= ut) slots.resize(ut + 1);
        if (w.set && w.thread != t) join_into(t, source_of(w), e.index);
        slots[ut] = {clocks_[ut], t, ordinal_[ut], true};
        break;
      }
      case Op::Write: {
        touch_var(e.operand);
        auto& slots = reads_[e.operand];
        bool any_read = false;
        for (const Entity& r : slots) any_read = any_read || r.set;
        if (any_read) {
          for (std::size_t u = 0; u < slots.size(); ++u)
            if (slots[u].set && static_cast<int>(u) != t)
              join_into(t, source_of(slots[u]), e.index);
        } else {
          Entity& w = writes_[e.operand];
          if (w.set && w.thread != t) join_into(t, source_of(w), e.index);
        }
        writes_[e.operand] = {clocks_[ut], t, ordinal_[ut], true};
        for (Entity& r : slots) r = {};
        break;
      }
      case Op::Acquire: {
        touch_lock(e.operand);
        Entity& l = releases_[e.operand];
        if (l.set && l.thread != t) join_into(t, source_of(l), e.index);
        break;
      }
      case Op::Release:
        touch_lock(e.operand);
        releases_[e.operand] = {clocks_[ut], t, ordinal_[ut], true};
        break;
      default:
        break;
    }
    if (unary) end_tx(t, e.index);
  }

  const Trace& trace_;
  EngineResult result_;
  std::vector<VectorClock> clocks_;
  std::vector<VectorClock> begin_;
  std::vector<char> open_;
  std::vector<std::string> open_label_;
  std::vector<Timestamp> ordinal_;
  std::unordered_map<int, bool> seen_thread_;
  std::vector<int> thread_order_;
  std::unordered_map<std::string, Entity> writes_;
  std::unordered_map<std::string, std::vector<Entity>> reads_;
  std::unordered_map<std::string, Entity> releases_;
  std::vector<std::string> var_order_;
  std::vector<std::string> lock_order_;
  std::uint64_t tx_count_ = 0;
  std::uint64_t joins_ = 0;
  std::uint64_t end_events_ = 0;
  std::uint64_t max_open_ = 0;
};

}  // namespace

EngineResult velodrome_check(const Trace& trace) { return Velodrome(trace).run(); }
EngineResult aerodrome_check(const Trace& trace) { return Aerodrome(trace).run(); }
EngineResult naive_blame_check(const Trace& trace) { return NaiveBlame(trace).run(); }

}  // namespace comparators
}  // namespace rtrack
