#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace cmpopt {

/// Logical sampling contexts. Each one gets its own sub-stream of the master seed.
enum class Stream : std::uint32_t {
  Oracle = 1,
  Truncation = 2,
  Direction = 3,
  OutputIndex = 4,
  Diagnostic = 5,
  Replicate = 6,
  Objective = 7,
};

/// Seedable random stream.
///
/// Sub-streams are derived by hashing (master seed, stream tag, context indices) through
/// std::seed_seq, so a sampling context's draws depend only on its own coordinates and never
/// on the order in which contexts are executed.
class Rng {
 public:
  using engine_type = std::mt19937_64;

  explicit Rng(std::uint64_t seed);

  /// Sub-stream for `stream` and a path of context indices (iteration, block, replicate chunk...).
  static Rng derive(std::uint64_t master, Stream stream, std::initializer_list<std::uint64_t> path = {});

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1].
  double uniform_open_zero() { return 1.0 - uniform(); }

  double normal() { return normal_(engine_); }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);

  engine_type& engine() { return engine_; }

 private:
  explicit Rng(std::seed_seq& seq);

  engine_type engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace cmpopt
