#ifndef SSD_COMMON_HPP
#define SSD_COMMON_HPP

#include <atomic>
#include <cmath>
#include <cstdint>
#include <future>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace ssd {

/// Raised when a caller violates an operation's contract (bad shapes,
/// out-of-range parameters, inconsistent inputs).
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised on file-system and parsing failures.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when an input is structurally valid but numerically degenerate
/// for the requested operation (all-diagonal row before stripping, zero
/// self-likelihood, disconnected similarity graph at every kernel width).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool cond, const std::string& message) {
  if (!cond) throw ValidationError(message);
}

// ---------------------------------------------------------------------------
// Seeding and random numbers.
//
// All randomness in the library flows from caller-supplied 64-bit seeds.
// Sub-seeds are derived with derive_seed(root, tag, index) so that every
// stage of a pipeline is individually reproducible:
//
//   derive_seed(root, tag, i) = splitmix64(root ^ fnv1a64(tag)
//                                               ^ splitmix64((i+1) * GAMMA))
//
// where GAMMA is the splitmix64 increment constant.
// ---------------------------------------------------------------------------

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

inline std::uint64_t derive_seed(std::uint64_t root, const std::string& tag,
                                 std::uint64_t index = 0) {
  return splitmix64(root ^ fnv1a64(tag) ^
                    splitmix64((index + 1) * 0x9E3779B97F4A7C15ULL));
}

/// Deterministic random source. Distribution transforms are implemented
/// here rather than taken from <random> so that streams are identical
/// across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(splitmix64(seed ^ 0xD1B54A32D192ED03ULL)) {}

  std::uint64_t next_u64() {
    // xorshift* keeps the generator self-contained and fast.
    std::uint64_t x = state_;
    x ^= x >> 12;
    x ^= x << 25;
    x ^= x >> 27;
    state_ = x;
    return x * 0x2545F4914F6CDD1DULL;
  }

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [lo, hi], inclusive.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    require(lo <= hi, "uniform_int: empty range");
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    // Multiply-shift mapping; bias is < 2^-53 for the spans used here.
    return lo + static_cast<std::int64_t>(
                    static_cast<std::uint64_t>(uniform() * static_cast<double>(span)) %
                    span);
  }

  /// Standard normal via Box-Muller.
  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

 private:
  std::uint64_t state_;
};

// ---------------------------------------------------------------------------
// Operation counters. forward_backward() and log_likelihood() bump these;
// pipelines report stage deltas so the linear-vs-quadratic cost contrast
// between the distance methods is observable.
// ---------------------------------------------------------------------------

namespace instrument {

inline std::atomic<std::uint64_t>& forward_backward_calls() {
  static std::atomic<std::uint64_t> count{0};
  return count;
}

inline std::atomic<std::uint64_t>& likelihood_evaluations() {
  static std::atomic<std::uint64_t> count{0};
  return count;
}

inline void reset_counters() {
  forward_backward_calls().store(0);
  likelihood_evaluations().store(0);
}

}  // namespace instrument

// ---------------------------------------------------------------------------
// Parallel helpers. Work items are indexed and write to index-addressed
// slots; reductions happen serially in index order at the call site, so
// results do not depend on the thread count.
// ---------------------------------------------------------------------------

namespace parallel {

inline unsigned& max_threads_ref() {
  static unsigned n = std::max(1u, std::thread::hardware_concurrency());
  return n;
}

inline void set_max_threads(unsigned n) { max_threads_ref() = std::max(1u, n); }
inline unsigned max_threads() { return max_threads_ref(); }

template <typename Fn>
void for_index(std::size_t n, Fn&& fn) {
  const unsigned threads = std::min<std::size_t>(max_threads(), n);
  if (threads <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::future<void>> workers;
  workers.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    workers.push_back(std::async(std::launch::async, [&] {
      for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    }));
  }
  for (auto& w : workers) w.get();
}

}  // namespace parallel

}  // namespace ssd

#endif  // SSD_COMMON_HPP
