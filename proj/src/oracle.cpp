#include "rtrack/oracle.hpp"

#include <algorithm>
#include <deque>
#include <unordered_set>

#include "json.hpp"
#include "rtrack/analyzer.hpp"

namespace rtrack {
namespace oracle {

bool conflicts(const Event& a, const Event& b) {
  if (a.thread == b.thread) return true;
  if (a.is_access() && b.is_access() && a.operand == b.operand)
    return a.op == Op::Write || b.op == Op::Write;
  if (a.is_sync() && b.is_sync() && a.operand == b.operand) return true;
  return false;
}

HbClosure::HbClosure(const Trace& trace) {
  n_ = trace.size();
  if (n_ > kMaxClosureEvents)
    throw SizeGuardError("event closure limited to " +
                         std::to_string(kMaxClosureEvents) + " events");
  words_ = (n_ + 63) / 64;
  bits_.assign(n_ * words_, 0);
  const auto& events = trace.events();
  for (std::size_t j = 1; j <= n_; ++j) {
    std::uint64_t* rj = row(j);
    for (std::size_t i = 1; i < j; ++i) {
      if (!conflicts(events[i - 1], events[j - 1])) continue;
      rj[(i - 1) / 64] |= std::uint64_t{1} << ((i - 1) % 64);
      const std::uint64_t* ri = row(i);
      for (std::size_t w = 0; w < words_; ++w) rj[w] |= ri[w];
    }
  }
}

std::vector<TxRef> transactions_of(const Trace& trace) {
  std::vector<TxRef> txs;
  std::vector<int> open(trace.thread_count(), -1);      // index into txs
  std::vector<Timestamp> counter(trace.thread_count(), 0);
  for (const Event& e : trace.events()) {
    auto t = static_cast<std::size_t>(e.thread);
    if (e.op == Op::Begin) {
      if (open[t] >= 0)
        throw TraceError(e.index, "begin while a region is open");
      TxRef tx;
      tx.thread = e.thread;
      tx.ordinal = ++counter[t];
      tx.label = e.operand;
      tx.begin_index = e.index;
      tx.events.push_back(e.index);
      open[t] = static_cast<int>(txs.size());
      txs.push_back(std::move(tx));
    } else if (e.op == Op::End) {
      if (open[t] < 0) throw TraceError(e.index, "end without a begin");
      TxRef& tx = txs[static_cast<std::size_t>(open[t])];
      if (tx.label != e.operand)
        throw TraceError(e.index, "end label does not match open begin");
      tx.events.push_back(e.index);
      tx.end_index = e.index;
      open[t] = -1;
    } else if (open[t] >= 0) {
      txs[static_cast<std::size_t>(open[t])].events.push_back(e.index);
    } else {
      TxRef tx;
      tx.thread = e.thread;
      tx.ordinal = ++counter[t];
      tx.label = "<unary>";
      tx.begin_index = e.index;
      tx.end_index = e.index;
      tx.events.push_back(e.index);
      tx.unary = true;
      txs.push_back(std::move(tx));
    }
  }
  return txs;
}

ThbClosure::ThbClosure(const Trace& trace) {
  HbClosure hb(trace);
  txs_ = transactions_of(trace);
  const std::size_t m = txs_.size();
  matrix_.assign(m * m, 0);
  std::vector<std::size_t> event_tx(trace.size() + 1, 0);
  for (std::size_t k = 0; k < m; ++k)
    for (std::size_t idx : txs_[k].events) event_tx[idx] = k;

  for (std::size_t j = 1; j <= trace.size(); ++j)
    for (std::size_t i = 1; i < j; ++i)
      if (event_tx[i] != event_tx[j] && hb.reaches(i, j))
        matrix_[event_tx[i] * m + event_tx[j]] = 1;
  // Same-thread succession (already implied by the same-thread conflict rule,
  // stated explicitly all the same).
  std::vector<int> prev(trace.thread_count(), -1);
  for (std::size_t k = 0; k < m; ++k) {
    auto t = static_cast<std::size_t>(txs_[k].thread);
    if (prev[t] >= 0) matrix_[static_cast<std::size_t>(prev[t]) * m + k] = 1;
    prev[t] = static_cast<int>(k);
  }
  for (std::size_t k = 0; k < m; ++k)
    for (std::size_t i = 0; i < m; ++i)
      if (matrix_[i * m + k])
        for (std::size_t j = 0; j < m; ++j)
          if (matrix_[k * m + j]) matrix_[i * m + j] = 1;
}

std::set<std::pair<int, Timestamp>> violations(const Trace& trace) {
  std::set<std::pair<int, Timestamp>> out;
  HbClosure hb(trace);
  auto txs = transactions_of(trace);
  const std::size_t n = trace.size();
  const auto& events = trace.events();
  for (const TxRef& tx : txs) {
    bool hit = false;
    for (std::size_t ex = 1; ex <= n && !hit; ++ex) {
      if (events[ex - 1].thread == tx.thread) continue;
      if (!hb.reaches(tx.begin_index, ex)) continue;
      for (std::size_t em : tx.events) {
        if (hb.reaches(ex, em)) {
          hit = true;
          break;
        }
      }
    }
    if (hit) out.emplace(tx.thread, tx.ordinal);
  }
  return out;
}

bool nonserializable(const Trace& trace) {
  ThbClosure thb(trace);
  const auto& txs = thb.transactions();
  for (std::size_t i = 0; i < txs.size(); ++i)
    for (std::size_t j = i + 1; j < txs.size(); ++j)
      if (txs[i].thread != txs[j].thread && thb.reaches(i, j) && thb.reaches(j, i))
        return true;
  return false;
}

namespace {

// A permutation state is the sequence of thread ids; per-thread order never
// changes (same-thread events always conflict), so the k-th occurrence of
// thread t is always t's k-th event.
std::uint64_t pack_state(const std::vector<int>& seq) {
  std::uint64_t key = 0;
  for (std::size_t i = 0; i < seq.size(); ++i)
    key |= static_cast<std::uint64_t>(seq[i] & 0xf) << (4 * i);
  return key;
}

}  // namespace

std::vector<bool> swap_serializable_each(const Trace& trace,
                                         const std::vector<TxRef>& txs) {
  const std::size_t n = trace.size();
  if (n > kMaxSwapEvents)
    throw SizeGuardError("swap enumeration limited to " +
                         std::to_string(kMaxSwapEvents) + " events");
  if (trace.thread_count() > 15)
    throw SizeGuardError("swap enumeration limited to 15 threads");

  const auto& events = trace.events();
  // events of thread t in program order, and each event's per-thread position
  std::vector<std::vector<std::size_t>> by_thread(trace.thread_count());
  std::vector<std::size_t> thread_pos(n + 1, 0);
  for (const Event& e : events) {
    thread_pos[e.index] = by_thread[static_cast<std::size_t>(e.thread)].size();
    by_thread[static_cast<std::size_t>(e.thread)].push_back(e.index);
  }
  std::vector<std::vector<char>> conflict(n + 1, std::vector<char>(n + 1, 0));
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = i + 1; j <= n; ++j)
      conflict[i][j] = conflict[j][i] = conflicts(events[i - 1], events[j - 1]);

  // Per transaction: thread, first and last per-thread positions.
  struct Span {
    int thread;
    std::size_t first, last;
  };
  std::vector<Span> spans;
  spans.reserve(txs.size());
  for (const TxRef& tx : txs)
    spans.push_back({tx.thread, thread_pos[tx.events.front()], thread_pos[tx.events.back()]});

  std::vector<bool> serial(txs.size(), false);
  std::size_t open_count = txs.size();

  std::vector<int> start(n);
  for (std::size_t i = 0; i < n; ++i) start[i] = events[i].thread;

  std::deque<std::vector<int>> queue;
  std::unordered_set<std::uint64_t> visited;
  queue.push_back(start);
  visited.insert(pack_state(start));

  std::vector<std::size_t> occ(trace.thread_count());
  std::vector<std::size_t> ids(n);
  while (!queue.empty() && open_count > 0) {
    std::vector<int> seq = std::move(queue.front());
    queue.pop_front();

    std::fill(occ.begin(), occ.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      auto t = static_cast<std::size_t>(seq[i]);
      ids[i] = by_thread[t][occ[t]++];
    }
    // Mark transactions whose events sit consecutively in this order.
    for (std::size_t k = 0; k < spans.size(); ++k) {
      if (serial[k]) continue;
      const Span& sp = spans[k];
      std::size_t count = 0, first_at = 0, last_at = 0, seen = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (seq[i] != sp.thread) continue;
        if (seen >= sp.first && seen <= sp.last) {
          if (count == 0) first_at = i;
          last_at = i;
          ++count;
        }
        ++seen;
      }
      if (count > 0 && last_at - first_at + 1 == count) {
        serial[k] = true;
        --open_count;
      }
    }
    if (open_count == 0) break;

    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (seq[i] == seq[i + 1]) continue;
      if (conflict[ids[i]][ids[i + 1]]) continue;
      std::vector<int> next = seq;
      std::swap(next[i], next[i + 1]);
      if (visited.insert(pack_state(next)).second) queue.push_back(std::move(next));
    }
  }
  return serial;
}

bool swap_serializability(const Trace& trace, const TxRef& tx) {
  auto txs = transactions_of(trace);
  auto marks = swap_serializable_each(trace, txs);
  for (std::size_t k = 0; k < txs.size(); ++k)
    if (txs[k].thread == tx.thread && txs[k].ordinal == tx.ordinal) return marks[k];
  throw std::invalid_argument("transaction not found in trace");
}

std::string to_json(const Trace& trace) {
  nlohmann::ordered_json j;
  j["nonserializable"] = nonserializable(trace);
  j["violations"] = nlohmann::ordered_json::array();
  auto vs = violations(trace);
  auto txs = transactions_of(trace);
  for (const TxRef& tx : txs) {
    if (!vs.count({tx.thread, tx.ordinal})) continue;
    nlohmann::ordered_json jv;
    jv["thread"] = trace.thread_names()[static_cast<std::size_t>(tx.thread)];
    jv["ordinal"] = tx.ordinal;
    jv["label"] = tx.label;
    j["violations"].push_back(std::move(jv));
  }
  return j.dump() + "\n";
}

}  // namespace oracle
}  // namespace rtrack
