#include "rtrack/trace.hpp"

#include <array>
#include <optional>
#include <sstream>

namespace rtrack {

const char* op_name(Op op) {
  switch (op) {
    case Op::Read: return "r";
    case Op::Write: return "w";
    case Op::Acquire: return "acq";
    case Op::Release: return "rel";
    case Op::Begin: return "begin";
    case Op::End: return "end";
  }
  return "?";
}

void Trace::append(std::string_view thread, Op op, std::string_view operand) {
  std::string key(thread);
  auto [it, inserted] = thread_ids_.try_emplace(key, static_cast<int>(thread_names_.size()));
  if (inserted) thread_names_.push_back(key);
  Event e;
  e.op = op;
  e.thread = it->second;
  e.operand = std::string(operand);
  e.index = events_.size() + 1;
  events_.push_back(std::move(e));
}

int Trace::thread_index(std::string_view name) const {
  auto it = thread_ids_.find(std::string(name));
  return it == thread_ids_.end() ? -1 : it->second;
}

bool Trace::operator==(const Trace& other) const {
  if (thread_names_ != other.thread_names_) return false;
  if (events_.size() != other.events_.size()) return false;
  for (std::size_t i = 0; i < events_.size(); ++i) {
    const Event& a = events_[i];
    const Event& b = other.events_[i];
    if (a.op != b.op || a.thread != b.thread || a.operand != b.operand ||
        a.index != b.index)
      return false;
  }
  return true;
}

namespace {

bool token_char(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
         (c >= '0' && c <= '9') || c == '_' || c == '.' || c == '$' || c == '-';
}

bool valid_token(std::string_view tok) {
  if (tok.empty()) return false;
  for (char c : tok)
    if (!token_char(c)) return false;
  return true;
}

std::optional<Op> parse_op(std::string_view tok) {
  if (tok == "r") return Op::Read;
  if (tok == "w") return Op::Write;
  if (tok == "acq") return Op::Acquire;
  if (tok == "rel") return Op::Release;
  if (tok == "begin") return Op::Begin;
  if (tok == "end") return Op::End;
  return std::nullopt;
}

}  // namespace

Trace parse_trace(std::string_view text) {
  Trace trace;
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++lineno;

    if (auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);

    std::array<std::string_view, 3> tok;
    std::size_t ntok = 0;
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
      if (i >= line.size()) break;
      std::size_t start = i;
      while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
      if (ntok == 3)
        throw ParseError(lineno, "expected `<thread> <op> <operand>`, got extra token");
      tok[ntok++] = line.substr(start, i - start);
    }
    if (ntok == 0) continue;  // blank or comment-only line
    if (ntok != 3)
      throw ParseError(lineno, "expected `<thread> <op> <operand>`");
    if (!valid_token(tok[0]))
      throw ParseError(lineno, "bad thread token `" + std::string(tok[0]) + "`");
    auto op = parse_op(tok[1]);
    if (!op)
      throw ParseError(lineno, "unknown op token `" + std::string(tok[1]) + "`");
    if (!valid_token(tok[2]))
      throw ParseError(lineno, "bad operand token `" + std::string(tok[2]) + "`");
    trace.append(tok[0], *op, tok[2]);
  }
  return trace;
}

std::string serialize_trace(const Trace& trace) {
  std::ostringstream out;
  for (const Event& e : trace.events())
    out << trace.thread_names()[static_cast<std::size_t>(e.thread)] << ' '
        << op_name(e.op) << ' ' << e.operand << '\n';
  return out.str();
}

std::vector<StructuralViolation> validate(const Trace& trace) {
  std::vector<StructuralViolation> out;
  struct Open {
    std::string label;
    std::size_t begin_index;
  };
  std::vector<std::optional<Open>> open(trace.thread_count());

  for (const Event& e : trace.events()) {
    auto& slot = open[static_cast<std::size_t>(e.thread)];
    if (e.op == Op::Begin) {
      if (slot) {
        out.push_back({StructuralViolation::Rule::NestedBegin, e.index, false,
                       "begin `" + e.operand + "` while region `" + slot->label +
                           "` is open (flat regions only)"});
      } else {
        slot = Open{e.operand, e.index};
      }
    } else if (e.op == Op::End) {
      if (!slot) {
        out.push_back({StructuralViolation::Rule::EndWithoutBegin, e.index, false,
                       "end `" + e.operand + "` without a matching begin"});
      } else if (slot->label != e.operand) {
        out.push_back({StructuralViolation::Rule::EndLabelMismatch, e.index, false,
                       "end `" + e.operand + "` does not match open begin `" +
                           slot->label + "`"});
        slot.reset();
      } else {
        slot.reset();
      }
    }
  }
  for (std::size_t t = 0; t < open.size(); ++t) {
    if (open[t]) {
      out.push_back({StructuralViolation::Rule::UnclosedRegion, open[t]->begin_index,
                     true,
                     "region `" + open[t]->label + "` on thread `" +
                         trace.thread_names()[t] + "` still open at end of trace"});
    }
  }
  return out;
}

}  // namespace rtrack
