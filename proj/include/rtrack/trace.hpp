#ifndef RTRACK_TRACE_HPP
#define RTRACK_TRACE_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace rtrack {

enum class Op { Read, Write, Acquire, Release, Begin, End };

const char* op_name(Op op);

/// One trace entry. `thread` is a dense index into Trace::thread_names,
/// assigned in first-appearance order; `index` is the 1-based position in
/// the owning trace.
struct Event {
  Op op;
  int thread = 0;
  std::string operand;
  std::size_t index = 0;

  bool is_access() const { return op == Op::Read || op == Op::Write; }
  bool is_sync() const { return op == Op::Acquire || op == Op::Release; }
  bool is_marker() const { return op == Op::Begin || op == Op::End; }
};

class Trace {
 public:
  // Interns the thread token (first appearance assigns the next index) and
  // appends the event with its 1-based index.
  void append(std::string_view thread, Op op, std::string_view operand);

  int thread_index(std::string_view name) const;  // -1 if unknown

  const std::vector<Event>& events() const { return events_; }
  const std::vector<std::string>& thread_names() const { return thread_names_; }
  std::size_t thread_count() const { return thread_names_.size(); }
  std::size_t size() const { return events_.size(); }
  bool empty() const { return events_.empty(); }

  bool operator==(const Trace& other) const;

 private:
  std::vector<Event> events_;
  std::vector<std::string> thread_names_;
  std::unordered_map<std::string, int> thread_ids_;
};

struct ParseError : std::runtime_error {
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line(line) {}
  std::size_t line;
};

// Line-oriented text format: `<thread> <op> <operand>` with space or tab
// separation, `#` comments, blank lines ignored. Tokens: [A-Za-z0-9_.$-]+.
Trace parse_trace(std::string_view text);
std::string serialize_trace(const Trace& trace);

struct StructuralViolation {
  enum class Rule { NestedBegin, EndWithoutBegin, EndLabelMismatch, UnclosedRegion };
  Rule rule;
  std::size_t index;  // offending event index (1-based); for UnclosedRegion, the open Begin
  bool warning = false;
  std::string message;
};

// Empty iff the trace invariants hold. Unclosed regions at end-of-trace are
// reported as warnings; the checker still analyzes such traces.
std::vector<StructuralViolation> validate(const Trace& trace);

inline bool passes_validation(const std::vector<StructuralViolation>& vs) {
  for (const auto& v : vs)
    if (!v.warning) return false;
  return true;
}

}  // namespace rtrack

#endif
