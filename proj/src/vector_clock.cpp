#include "rtrack/vector_clock.hpp"

#include <sstream>

namespace rtrack {

std::string to_json(const VectorClock& clock) {
  std::ostringstream out;
  out << '[';
  for (std::size_t i = 0; i < clock.size(); ++i) {
    if (i) out << ',';
    out << clock.get(i);
  }
  out << ']';
  return out.str();
}

}  // namespace rtrack
