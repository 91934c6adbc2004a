#include "rtrack/analyzer.hpp"

#include <algorithm>
#include <cassert>

namespace rtrack {

namespace {
constexpr const char* kUnaryLabel = "<unary>";
}

const char* mode_name(Mode mode) {
  switch (mode) {
    case Mode::AtomicityOnly: return "atomicity";
    case Mode::TraceOnly: return "trace";
    case Mode::Full: return "full";
  }
  return "?";
}

Analyzer::Analyzer(Mode mode, std::size_t thread_hint, AnalyzerDebug* debug)
    : mode_(mode), debug_(debug) {
  if (thread_hint > 0) {
    clocks_.reserve(thread_hint);
    current_.reserve(thread_hint);
    if (mode_ != Mode::AtomicityOnly) tvc_.reserve(thread_hint);
  }
}

Analyzer::~Analyzer() = default;

Report Analyzer::take_report() {
  if (debug_) {
    debug_->checkhb_calls = checkhb_calls_;
    debug_->checkhb_max_comparisons = checkhb_cmp_max_;
  }
  return std::move(report_);
}

void Analyzer::ensure_thread(int t) {
  auto n = static_cast<std::size_t>(t) + 1;
  if (n <= nthreads_) return;
  nthreads_ = n;
  if (clocks_.size() < n) clocks_.resize(n);
  if (current_.size() < n) current_.resize(n);
  if (mode_ != Mode::AtomicityOnly && tvc_.size() < n) tvc_.resize(n);
}

int Analyzer::var_id(const std::string& name) {
  auto [it, inserted] = var_ids_.try_emplace(name, static_cast<int>(last_write_.size()));
  if (inserted) {
    last_write_.emplace_back();
    last_read_.emplace_back();
    read_count_.push_back(0);
  }
  return it->second;
}

int Analyzer::lock_id(const std::string& name) {
  auto [it, inserted] = lock_ids_.try_emplace(name, static_cast<int>(last_release_.size()));
  if (inserted) last_release_.emplace_back();
  return it->second;
}

Analyzer::ClockRef& Analyzer::read_slot(int var, int t) {
  auto& slots = last_read_[static_cast<std::size_t>(var)];
  if (slots.size() <= static_cast<std::size_t>(t)) slots.resize(static_cast<std::size_t>(t) + 1);
  return slots[static_cast<std::size_t>(t)];
}

void Analyzer::on_event(const Event& e) {
  ensure_thread(e.thread);
  const int t = e.thread;
  switch (e.op) {
    case Op::Begin:
      if (current_[static_cast<std::size_t>(t)])
        throw TraceError(e.index, "begin `" + e.operand + "` while region `" +
                                      current_[static_cast<std::size_t>(t)]->label +
                                      "` is open");
      handle_begin(t, e.operand, e.index, false);
      break;
    case Op::End: {
      auto& node = current_[static_cast<std::size_t>(t)];
      if (!node) throw TraceError(e.index, "end `" + e.operand + "` without a begin");
      if (node->label != e.operand)
        throw TraceError(e.index, "end `" + e.operand + "` does not match open begin `" +
                                      node->label + "`");
      handle_end(t);
      break;
    }
    default: {
      // An event outside any region forms a unary transaction: full begin
      // semantics (increment, fresh node, shadow snapshot), then the event,
      // then end semantics.
      const bool unary = !current_[static_cast<std::size_t>(t)];
      if (unary) handle_begin(t, kUnaryLabel, e.index, true);
      switch (e.op) {
        case Op::Read: handle_read(t, e.operand, e.index); break;
        case Op::Write: handle_write(t, e.operand, e.index); break;
        case Op::Acquire: handle_acquire(t, e.operand, e.index); break;
        case Op::Release: handle_release(t, e.operand); break;
        default: break;
      }
      if (unary) handle_end(t);
      break;
    }
  }
  if (debug_ && debug_->record_event_clocks)
    debug_->event_clocks.push_back(clocks_[static_cast<std::size_t>(t)]);
  if (debug_ && debug_->record_tvc && mode_ != Mode::AtomicityOnly) {
    for (std::size_t u = 0; u < nthreads_; ++u)
      debug_->tvc_log.push_back({e.index, AnalyzerDebug::TvcPhase::EventDone,
                                 static_cast<int>(u), tvc_[u]});
  }
}

void Analyzer::handle_begin(int t, const std::string& label, std::size_t idx, bool unary) {
  auto ut = static_cast<std::size_t>(t);
  clocks_[ut].inc(static_cast<std::size_t>(t));
  auto node = std::make_unique<TxNode>();
  node->label = label;
  node->thread = t;
  node->ordinal = clocks_[ut].get(static_cast<std::size_t>(t));
  node->begin_clock = std::make_shared<const VectorClock>(clocks_[ut]);
  node->curr_clock = node->begin_clock;
  node->tvc_current =
      mode_ != Mode::AtomicityOnly && tvc_[ut].get(static_cast<std::size_t>(t)) == node->ordinal;
  current_[ut] = std::move(node);
  ++live_nodes_;
  report_.stats.max_live_nodes = std::max(report_.stats.max_live_nodes, live_nodes_);
  ++report_.stats.transactions;
  if (debug_ && debug_->record_event_clocks)
    debug_->transactions.push_back({t, current_[ut]->ordinal, label, idx,
                                    *current_[ut]->begin_clock, unary});
}

void Analyzer::handle_end(int t) {
  // The node becomes unreachable from the analyzer; live W/R/L references
  // keep only its clock snapshots alive.
  current_[static_cast<std::size_t>(t)].reset();
  --live_nodes_;
}

void Analyzer::sub_region(int t) {
  auto ut = static_cast<std::size_t>(t);
  TxNode& node = *current_[ut];
  if (!node.curr_clock->same(clocks_[ut])) {
    node.curr_clock = std::make_shared<const VectorClock>(clocks_[ut]);
    ++report_.stats.subregions;
  }
}

void Analyzer::handle_read(int t, const std::string& var, std::size_t idx) {
  int x = var_id(var);
  AccessRef& w = last_write_[static_cast<std::size_t>(x)];
  ClockRef& mine = read_slot(x, t);
  if (w.clock && w.thread != t && !mine) {
    do_join(w.clock, w.thread, t, idx);
    sub_region(t);
  }
  if (!mine) ++read_count_[static_cast<std::size_t>(x)];
  mine = current_[static_cast<std::size_t>(t)]->curr_clock;
}

void Analyzer::handle_write(int t, const std::string& var, std::size_t idx) {
  int x = var_id(var);
  auto& readers = last_read_[static_cast<std::size_t>(x)];
  if (read_count_[static_cast<std::size_t>(x)] > 0) {
    for (std::size_t u = 0; u < readers.size(); ++u) {
      if (static_cast<int>(u) == t || !readers[u]) continue;
      do_join(readers[u], static_cast<int>(u), t, idx);
    }
  } else {
    AccessRef& w = last_write_[static_cast<std::size_t>(x)];
    if (w.clock && w.thread != t) do_join(w.clock, w.thread, t, idx);
  }
  sub_region(t);
  last_write_[static_cast<std::size_t>(x)] = {current_[static_cast<std::size_t>(t)]->curr_clock, t};
  for (auto& slot : readers) slot.reset();
  read_count_[static_cast<std::size_t>(x)] = 0;
}

void Analyzer::handle_acquire(int t, const std::string& lock, std::size_t idx) {
  int m = lock_id(lock);
  AccessRef& rel = last_release_[static_cast<std::size_t>(m)];
  if (rel.clock && rel.thread != t) {
    do_join(rel.clock, rel.thread, t, idx);
    sub_region(t);
  }
}

void Analyzer::handle_release(int t, const std::string& lock) {
  int m = lock_id(lock);
  last_release_[static_cast<std::size_t>(m)] = {
      current_[static_cast<std::size_t>(t)]->curr_clock, t};
}

void Analyzer::do_join(const ClockRef& source, int source_thread, int t, std::size_t idx) {
  ++report_.stats.joins;
  clocks_[static_cast<std::size_t>(t)].join(*source);
  if (mode_ != Mode::AtomicityOnly) update_tvc(*source, source_thread, t, idx);
  check_hb(t, *source, source, source_thread, idx);
}

void Analyzer::check_hb(int t, const VectorClock& source, const ClockRef& source_ref,
                        int source_thread, std::size_t idx) {
  ++checkhb_calls_;
  std::uint64_t cmp = 0;
  TxNode& node = *current_[static_cast<std::size_t>(t)];
  ++cmp;
  if (node.ordinal <= source.get(static_cast<std::size_t>(t))) {
    // V(C(t).begin)[t] <= V(e_x)[t]: tx.begin happens before the source
    // event, an increasing cycle closes here.
    record_violation(t, source_thread, source_ref, idx);
  } else if (mode_ != Mode::AtomicityOnly && node.tvc_current) {
    Timestamp sink = tvc_[static_cast<std::size_t>(t)].get(static_cast<std::size_t>(source_thread));
    if (sink != 0) {
      ++cmp;
      if (sink <= source.get(static_cast<std::size_t>(source_thread))) latch_nonser(idx);
    }
  }
  checkhb_cmp_max_ = std::max(checkhb_cmp_max_, cmp);
}

void Analyzer::update_tvc(const VectorClock& source_clock, int source_thread, int t,
                          std::size_t idx) {
  auto s = static_cast<std::size_t>(source_thread);
  Timestamp source = source_clock.get(s);
  Timestamp sink = clocks_[static_cast<std::size_t>(t)].get(static_cast<std::size_t>(t));
  VectorClock& tvs = tvc_[s];
  bool direct = false;
  if (tvs.get(s) == source) {
    // Same latest source transaction: keep only the first sink of t.
    Timestamp cur = tvs.get(static_cast<std::size_t>(t));
    if (cur == 0 || cur > sink) tvs.set(static_cast<std::size_t>(t), sink);
    direct = true;
  } else if (tvs.get(s) < source) {
    // A newer source transaction supersedes the recorded one.
    tvs.clear();
    tvs.set(s, source);
    tvs.set(static_cast<std::size_t>(t), sink);
    if (auto& src_node = current_[s])
      src_node->tvc_current = src_node->ordinal == source;
    direct = true;
  }
  // else: the recorded source transaction is newer; no direct update.
  if (debug_ && debug_->record_tvc)
    debug_->tvc_log.push_back({idx, AnalyzerDebug::TvcPhase::DirectUpdate,
                               source_thread, tvs});
  if (direct) {
    std::uint64_t visits = 0;
    auto working = full_thread_set();
    forward_propagate(working, source_thread, t, visits);
    if (debug_) debug_->max_forward_visits = std::max(debug_->max_forward_visits, visits);
  }
  std::uint64_t visits = 0;
  auto working = full_thread_set();
  back_propagate(working, source_thread, t, source, sink, visits);
  if (debug_) debug_->max_back_visits = std::max(debug_->max_back_visits, visits);
}

std::vector<char> Analyzer::full_thread_set() const {
  return std::vector<char>(nthreads_, 1);
}

void Analyzer::forward_propagate(std::vector<char>& working, int t1, int t2,
                                 std::uint64_t& visits) {
  ++visits;
  working[static_cast<std::size_t>(t1)] = 0;
  working[static_cast<std::size_t>(t2)] = 0;
  VectorClock& tv1 = tvc_[static_cast<std::size_t>(t1)];
  const VectorClock& tv2 = tvc_[static_cast<std::size_t>(t2)];
  Timestamp link = tv1.get(static_cast<std::size_t>(t2));
  Timestamp own2 = tv2.get(static_cast<std::size_t>(t2));
  // tv1's recorded sink on t2 still precedes (or is) t2's latest source
  // transaction, so whatever t2's latest source can see, t1 can see too.
  if (link == 0 || own2 == 0 || link > own2) return;
  for (std::size_t u = 0; u < nthreads_; ++u) {
    if (static_cast<int>(u) == t1) continue;
    Timestamp theirs = tv2.get(u);
    Timestamp ours = tv1.get(u);
    if (theirs != 0 && (ours == 0 || ours > theirs)) {
      tv1.set(u, theirs);
      if (working[u]) forward_propagate(working, t1, static_cast<int>(u), visits);
    }
  }
}

void Analyzer::back_propagate(std::vector<char>& working, int t1, int t2,
                              Timestamp source, Timestamp sink, std::uint64_t& visits) {
  ++visits;
  working[static_cast<std::size_t>(t1)] = 0;
  working[static_cast<std::size_t>(t2)] = 0;
  for (std::size_t u = 0; u < nthreads_; ++u) {
    if (!working[u]) continue;
    VectorClock& tvu = tvc_[u];
    Timestamp seen = tvu.get(static_cast<std::size_t>(t1));
    if (seen == 0 || seen > source) continue;
    // u's latest source transaction reaches t1's, so the new sink is also a
    // sink of u's; record it if it is the first one.
    Timestamp cur = tvu.get(static_cast<std::size_t>(t2));
    if (cur == 0 || cur > sink) tvu.set(static_cast<std::size_t>(t2), sink);
    {
      std::uint64_t fwd_visits = 0;
      auto fresh = full_thread_set();
      forward_propagate(fresh, static_cast<int>(u), t1, fwd_visits);
      if (debug_) debug_->max_forward_visits = std::max(debug_->max_forward_visits, fwd_visits);
    }
    back_propagate(working, static_cast<int>(u), t2,
                   tvu.get(u), sink, visits);
  }
}

void Analyzer::latch_nonser(std::size_t idx) {
  if (!report_.non_serializable) {
    report_.non_serializable = true;
    report_.first_nonser_event = idx;
  }
}

void Analyzer::record_violation(int t, int source_thread, const ClockRef& source_ref,
                                std::size_t idx) {
  // An increasing cycle implies a non-serializable trace as well.
  latch_nonser(idx);
  if (mode_ == Mode::TraceOnly) return;
  TxNode& node = *current_[static_cast<std::size_t>(t)];
  if (node.reported_sources.insert(source_ref).second)
    report_.violations.push_back({idx, t, node.label, node.ordinal, source_thread});
}

Report analyze(const Trace& trace, Mode mode, const AnalyzeOptions& options) {
  Analyzer analyzer(mode, options.thread_hint ? options.thread_hint : trace.thread_count(),
                    options.debug);
  for (const Event& e : trace.events()) analyzer.on_event(e);
  return analyzer.take_report();
}

}  // namespace rtrack
