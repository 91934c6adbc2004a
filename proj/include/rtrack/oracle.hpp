#ifndef RTRACK_ORACLE_HPP
#define RTRACK_ORACLE_HPP

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "rtrack/trace.hpp"
#include "rtrack/vector_clock.hpp"

namespace rtrack {
namespace oracle {

// Brute-force ground truth for desk-scale traces. Everything here works on
// explicit transitive closures; size guards keep it honest. The swap bound
// leaves headroom above the documented 12 so the worked 14-event traces fit.
constexpr std::size_t kMaxClosureEvents = 200;
constexpr std::size_t kMaxSwapEvents = 16;

struct SizeGuardError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Two events conflict iff they touch the same variable with at least one
// write, the same lock, or run on the same thread. Begin/End markers only
// conflict through the same-thread condition.
bool conflicts(const Event& a, const Event& b);

/// Event-level happens-before: trace order over conflicting pairs,
/// transitively closed. Indices are the 1-based trace indices.
class HbClosure {
 public:
  explicit HbClosure(const Trace& trace);

  std::size_t size() const { return n_; }
  bool reaches(std::size_t i, std::size_t j) const {
    return j >= 1 && j <= n_ && i >= 1 && i <= n_ &&
           (row(j)[(i - 1) / 64] >> ((i - 1) % 64)) & 1;
  }

 private:
  const std::uint64_t* row(std::size_t j) const { return &bits_[(j - 1) * words_]; }
  std::uint64_t* row(std::size_t j) { return &bits_[(j - 1) * words_]; }

  std::size_t n_ = 0;
  std::size_t words_ = 0;
  std::vector<std::uint64_t> bits_;  // row j = predecessors of event j
};

struct TxRef {
  int thread = 0;
  Timestamp ordinal = 0;  // per-thread counter over regular and unary transactions
  std::string label;      // "<unary>" for unary transactions
  std::size_t begin_index = 0;  // the begin event; for unary, the event itself
  std::optional<std::size_t> end_index;  // unset while still running
  std::vector<std::size_t> events;       // member event indices, markers included
  bool unary = false;
};

// Transactions in trace order, unary ones included; an event stream with
// structural errors is rejected with TraceError.
std::vector<TxRef> transactions_of(const Trace& trace);

/// Transactional happens-before over all transactions: lifted event relations
/// plus same-thread succession, transitively closed.
class ThbClosure {
 public:
  explicit ThbClosure(const Trace& trace);

  const std::vector<TxRef>& transactions() const { return txs_; }
  bool reaches(std::size_t i, std::size_t j) const { return matrix_[i * txs_.size() + j]; }

 private:
  std::vector<TxRef> txs_;
  std::vector<char> matrix_;
};

// The exact set of non-serializable transactions as (thread, ordinal) pairs:
// a transaction tx is violated iff some event of tx is reached by a
// cross-thread event e_x that tx.begin itself reaches.
std::set<std::pair<int, Timestamp>> violations(const Trace& trace);

// True iff two transactions of different threads reach each other.
bool nonserializable(const Trace& trace);

// Micro-oracle: enumerates the permutation class generated by adjacent
// commuting swaps and reports, per transaction, whether any member of the
// class runs that transaction's events consecutively.
std::vector<bool> swap_serializable_each(const Trace& trace,
                                         const std::vector<TxRef>& txs);
bool swap_serializability(const Trace& trace, const TxRef& tx);

std::string to_json(const Trace& trace);

}  // namespace oracle
}  // namespace rtrack

#endif
