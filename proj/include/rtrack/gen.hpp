#ifndef RTRACK_GEN_HPP
#define RTRACK_GEN_HPP

#include <cstdint>
#include <cstddef>

#include "rtrack/trace.hpp"

namespace rtrack {

/// Knobs for the seeded random trace generator. `events` counts payload
/// operations (r/w/acq/rel); region markers are emitted on top of that.
struct GenConfig {
  std::size_t threads = 2;
  std::size_t events = 10;
  std::size_t variables = 2;
  std::size_t locks = 0;
  std::size_t labels = 2;
  double p_region = 0.6;   // chance an idle thread opens a region before its next op
  double p_close = 0.3;    // chance an open region closes instead of emitting an op
  double w_read = 1.0;
  double w_write = 1.0;
  double w_acquire = 0.5;
  double w_release = 0.5;

  void check() const;  // throws std::invalid_argument on bad values
};

// Deterministic for a fixed (config, seed); the result always passes
// validate() and every open region is closed before the trace ends.
Trace generate_random(const GenConfig& config, std::uint64_t seed);

}  // namespace rtrack

#endif
