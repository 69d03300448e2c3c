// rp-lab: counter-based splittable random number streams.
//
// Reproducible parallel Monte Carlo needs per-task streams that (a) can be
// derived from a master seed plus a list of indices (environment, path, ...)
// without any shared mutable state and (b) produce the same numbers no matter
// how tasks are scheduled across workers.  We use a keyed Weyl counter pushed
// through the splitmix64 finalizer: the output of
//     mix64(key + GOLDEN * counter)
// passes standard statistical batteries, and key derivation is just another
// mix, so substreams are cheap and independent for all practical purposes.
#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <utility>

namespace rplab {

// splitmix64 finalizer (Vigna); bijective on 64-bit words.
inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class CounterRng {
 public:
  explicit CounterRng(std::uint64_t master_seed) : key_(mix64(master_seed)) {}

  // A child stream keyed on this stream plus an index; used to fan out
  // (master) -> (environment) -> (path) without consuming from the parent.
  CounterRng child(std::uint64_t index) const {
    CounterRng r(*this);
    r.key_ = mix64(key_ ^ (0xD1B54A32D192ED03ULL * (index + 1)));
    r.counter_ = 0;
    r.have_spare_ = false;
    return r;
  }

  CounterRng child(std::initializer_list<std::uint64_t> indices) const {
    CounterRng r(*this);
    for (std::uint64_t i : indices) r = r.child(i);
    return r;
  }

  std::uint64_t next_u64() {
    return mix64(key_ + 0x9E3779B97F4A7C15ULL * ++counter_);
  }

  // Uniform on [0,1) with 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform on (0,1); safe as a log() argument.
  double next_open() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal via the Marsaglia polar method.  The second component of
  // each accepted pair is cached, so consecutive calls consume the stream in a
  // fixed, reproducible order.
  double next_normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    auto [a, b] = next_normal_pair();
    spare_ = b;
    have_spare_ = true;
    return a;
  }

  std::pair<double, double> next_normal_pair() {
    for (;;) {
      const double u = 2.0 * next_double() - 1.0;
      const double v = 2.0 * next_double() - 1.0;
      const double s = u * u + v * v;
      if (s > 0.0 && s < 1.0) {
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        return {u * f, v * f};
      }
    }
  }

  // Exact Poisson sample.  Knuth inversion for small means; larger means are
  // split recursively (Poisson(m) = Poisson(m/2) + Poisson(m/2) for
  // independent summands), which stays exact and is fast enough for the cloud
  // cardinalities used here.
  long next_poisson(double mean) {
    if (mean <= 0.0) return 0;
    if (mean < 30.0) {
      const double limit = std::exp(-mean);
      long k = 0;
      double prod = next_open();
      while (prod > limit) {
        ++k;
        prod *= next_open();
      }
      return k;
    }
    // Split recursively: Poisson(m) = Poisson(m/2) + Poisson(m/2).
    const long a = next_poisson(0.5 * mean);
    const long b = next_poisson(0.5 * mean);
    return a + b;
  }

  std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

// Stream-purpose tags, so that e.g. cloud sampling and path simulation of the
// same environment index never collide.
namespace stream_tag {
inline constexpr std::uint64_t kCloud = 0x11;
inline constexpr std::uint64_t kPath = 0x22;
inline constexpr std::uint64_t kBootstrap = 0x33;
inline constexpr std::uint64_t kMisc = 0x44;
}  // namespace stream_tag

}  // namespace rplab
