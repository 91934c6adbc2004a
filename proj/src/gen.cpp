#include "rtrack/gen.hpp"

#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace rtrack {

namespace {

// Draws are hand-rolled on top of the raw mt19937_64 stream so that a given
// (config, seed) produces the same trace on every standard library.
std::size_t pick(std::mt19937_64& rng, std::size_t n) {
  return static_cast<std::size_t>(rng() % n);
}

bool chance(std::mt19937_64& rng, double p) {
  return (static_cast<double>(rng() >> 11) * 0x1.0p-53) < p;
}

std::size_t pick_weighted(std::mt19937_64& rng, const std::vector<double>& weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  double x = (static_cast<double>(rng() >> 11) * 0x1.0p-53) * total;
  for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
    if (x < weights[i]) return i;
    x -= weights[i];
  }
  return weights.size() - 1;
}

}  // namespace

void GenConfig::check() const {
  if (threads < 2) throw std::invalid_argument("generator needs >= 2 threads");
  if (variables < 1) throw std::invalid_argument("generator needs >= 1 variable");
  if (labels < 1) throw std::invalid_argument("generator needs >= 1 region label");
  if (p_region < 0.0 || p_region > 1.0 || p_close < 0.0 || p_close > 1.0)
    throw std::invalid_argument("probabilities must lie in [0,1]");
  double sum = w_read + w_write + w_acquire + w_release;
  if (!(sum > 0.0) || w_read < 0 || w_write < 0 || w_acquire < 0 || w_release < 0)
    throw std::invalid_argument("op-mix weights must be non-negative with positive sum");
}

Trace generate_random(const GenConfig& config, std::uint64_t seed) {
  config.check();
  std::mt19937_64 rng(seed);
  Trace trace;

  std::vector<std::string> thread_tok(config.threads);
  std::vector<std::string> var_tok(config.variables);
  std::vector<std::string> lock_tok(config.locks);
  std::vector<std::string> label_tok(config.labels);
  for (std::size_t i = 0; i < config.threads; ++i) thread_tok[i] = "t" + std::to_string(i + 1);
  for (std::size_t i = 0; i < config.variables; ++i) var_tok[i] = "x" + std::to_string(i + 1);
  for (std::size_t i = 0; i < config.locks; ++i) lock_tok[i] = "m" + std::to_string(i + 1);
  for (std::size_t i = 0; i < config.labels; ++i)
    label_tok[i] = std::string(1, static_cast<char>('A' + i % 26)) +
                   (i >= 26 ? std::to_string(i / 26) : "");

  std::vector<double> mix = {config.w_read, config.w_write, config.w_acquire,
                             config.w_release};
  if (config.locks == 0) mix[2] = mix[3] = 0.0;
  if (mix[0] + mix[1] + mix[2] + mix[3] <= 0.0) mix[0] = mix[1] = 1.0;

  std::vector<int> open_label(config.threads, -1);
  // Lock discipline mirrors real executions: a lock is acquired only while
  // free and released only by its holder. -1 = free, else holder thread.
  std::vector<int> holder(config.locks, -1);
  std::size_t remaining = config.events;
  while (remaining > 0) {
    std::size_t t = pick(rng, config.threads);
    if (open_label[t] < 0 && chance(rng, config.p_region)) {
      open_label[t] = static_cast<int>(pick(rng, config.labels));
      trace.append(thread_tok[t], Op::Begin, label_tok[static_cast<std::size_t>(open_label[t])]);
      continue;
    }
    if (open_label[t] >= 0 && chance(rng, config.p_close)) {
      trace.append(thread_tok[t], Op::End, label_tok[static_cast<std::size_t>(open_label[t])]);
      open_label[t] = -1;
      continue;
    }
    std::size_t op = pick_weighted(rng, mix);
    if (op == 2 || op == 3) {
      std::vector<std::size_t> eligible;
      for (std::size_t m = 0; m < config.locks; ++m) {
        if (op == 2 ? holder[m] < 0 : holder[m] == static_cast<int>(t))
          eligible.push_back(m);
      }
      if (eligible.empty()) op = pick(rng, 2);  // fall back to an access
      else {
        std::size_t m = eligible[pick(rng, eligible.size())];
        if (op == 2) {
          holder[m] = static_cast<int>(t);
          trace.append(thread_tok[t], Op::Acquire, lock_tok[m]);
        } else {
          holder[m] = -1;
          trace.append(thread_tok[t], Op::Release, lock_tok[m]);
        }
        --remaining;
        continue;
      }
    }
    if (op == 0)
      trace.append(thread_tok[t], Op::Read, var_tok[pick(rng, config.variables)]);
    else
      trace.append(thread_tok[t], Op::Write, var_tok[pick(rng, config.variables)]);
    --remaining;
  }
  // Close whatever is still open, in random thread order.
  std::vector<std::size_t> still_open;
  for (std::size_t t = 0; t < config.threads; ++t)
    if (open_label[t] >= 0) still_open.push_back(t);
  while (!still_open.empty()) {
    std::size_t k = pick(rng, still_open.size());
    std::size_t t = still_open[k];
    trace.append(thread_tok[t], Op::End, label_tok[static_cast<std::size_t>(open_label[t])]);
    still_open.erase(still_open.begin() + static_cast<std::ptrdiff_t>(k));
  }
  return trace;
}

}  // namespace rtrack
