#ifndef RTRACK_VECTOR_CLOCK_HPP
#define RTRACK_VECTOR_CLOCK_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace rtrack {

using Timestamp = std::uint64_t;

/// Growable logical vector clock. Indices are thread indices; entries past
/// the current length read as 0 and the clock grows on demand when written.
class VectorClock {
 public:
  VectorClock() = default;
  explicit VectorClock(std::size_t size) : stamps_(size, 0) {}
  VectorClock(std::initializer_list<Timestamp> init) : stamps_(init) {}

  Timestamp get(std::size_t t) const {
    return t < stamps_.size() ? stamps_[t] : 0;
  }

  void set(std::size_t t, Timestamp value) {
    grow(t + 1);
    stamps_[t] = value;
  }

  void inc(std::size_t t) {
    grow(t + 1);
    if (stamps_[t] == UINT64_MAX)
      throw std::overflow_error("vector clock timestamp overflow");
    ++stamps_[t];
  }

  // Componentwise max, in place.
  void join(const VectorClock& other) {
    grow(other.stamps_.size());
    for (std::size_t i = 0; i < other.stamps_.size(); ++i)
      stamps_[i] = std::max(stamps_[i], other.stamps_[i]);
  }

  // Componentwise <= at every index (missing entries are 0).
  bool leq(const VectorClock& other) const {
    for (std::size_t i = 0; i < stamps_.size(); ++i)
      if (stamps_[i] > other.get(i)) return false;
    return true;
  }

  bool same(const VectorClock& other) const {
    return leq(other) && other.leq(*this);
  }

  void clear() { std::fill(stamps_.begin(), stamps_.end(), 0); }

  std::size_t size() const { return stamps_.size(); }
  const std::vector<Timestamp>& stamps() const { return stamps_; }

 private:
  void grow(std::size_t n) {
    if (stamps_.size() < n) stamps_.resize(n, 0);
  }

  std::vector<Timestamp> stamps_;
};

inline VectorClock join(const VectorClock& a, const VectorClock& b) {
  VectorClock out = a;
  out.join(b);
  return out;
}

// JSON integer-array rendering, e.g. [1,0,2]; used by debug reports.
std::string to_json(const VectorClock& clock);

}  // namespace rtrack

#endif
