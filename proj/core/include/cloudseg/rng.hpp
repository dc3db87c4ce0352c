#pragma once

#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cloudseg/errors.hpp"

namespace cloudseg {

// All randomness in the library flows through this wrapper. Draws are mapped
// from raw mt19937_64 output with fixed arithmetic, so a given seed produces
// the same stream on every standard library implementation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53-bit resolution.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  bool coin() { return (engine_() >> 63) != 0; }

  /// Uniform integer on [0, n), n > 0.
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw DomainError("Rng::below: n must be positive");
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(engine_()) * n) >> 64);
  }

  template <class T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  /// Engine state as text, for checkpointing.
  std::string save_state() const {
    std::ostringstream out;
    out << engine_;
    return out.str();
  }

  void restore_state(const std::string& text) {
    std::istringstream in(text);
    in >> engine_;
    if (!in) throw FormatError("Rng::restore_state: unparsable state");
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace cloudseg
