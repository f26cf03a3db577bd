#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace cmpopt {

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  void merge(const CompensatedSum& o) {
    add(o.sum_);
    add(o.comp_);
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Sample mean and standard error from compensated first and second moments.
class MeanAccumulator {
 public:
  void add(double x) {
    ++n_;
    s1_.add(x);
    s2_.add(x * x);
  }
  void merge(const MeanAccumulator& o) {
    n_ += o.n_;
    s1_.merge(o.s1_);
    s2_.merge(o.s2_);
  }
  std::int64_t count() const { return n_; }
  double mean() const { return n_ ? s1_.value() / static_cast<double>(n_) : 0.0; }
  double mean_square() const { return n_ ? s2_.value() / static_cast<double>(n_) : 0.0; }
  double variance() const {
    if (n_ < 2) return 0.0;
    const double n = static_cast<double>(n_);
    const double m = s1_.value() / n;
    return std::max(0.0, (s2_.value() - n * m * m) / (n - 1.0));
  }
  double standard_error() const { return n_ ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0; }

 private:
  std::int64_t n_ = 0;
  CompensatedSum s1_;
  CompensatedSum s2_;
};

/// Replicates per chunk. Chunk boundaries, and hence random streams, never depend on the
/// number of workers.
inline constexpr std::int64_t kReplicateChunk = 4096;

/// Splits [0, n) into fixed chunks, runs `body(chunk_index, begin, end) -> Acc` on up to
/// `workers` threads, and merges the partial results in chunk order with Acc::merge.
template <class Acc, class Body>
Acc run_chunked(std::int64_t n, int workers, Body body, std::int64_t chunk = kReplicateChunk) {
  const std::int64_t chunks = n <= 0 ? 0 : (n + chunk - 1) / chunk;
  std::vector<Acc> parts(static_cast<std::size_t>(chunks));
  std::atomic<std::int64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::int64_t c = next.fetch_add(1);
      if (c >= chunks) return;
      try {
        parts[static_cast<std::size_t>(c)] = body(c, c * chunk, std::min(n, (c + 1) * chunk));
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(chunks);
        return;
      }
    }
  };
  const int w = static_cast<int>(std::clamp<std::int64_t>(workers, 1, std::max<std::int64_t>(chunks, 1)));
  if (w == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(w);
    for (int i = 0; i < w; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
  Acc total{};
  for (const auto& p : parts) total.merge(p);
  return total;
}

/// Runs `body(i)` for i in [0, n) on up to `workers` threads; results kept in index order.
template <class R, class Body>
std::vector<R> run_indexed(std::int64_t n, int workers, Body body) {
  std::vector<R> out(static_cast<std::size_t>(std::max<std::int64_t>(n, 0)));
  struct Unit {
    void merge(const Unit&) {}
  };
  run_chunked<Unit>(
      n, workers,
      [&](std::int64_t, std::int64_t b, std::int64_t e) {
        for (std::int64_t i = b; i < e; ++i) out[static_cast<std::size_t>(i)] = body(i);
        return Unit{};
      },
      1);
  return out;
}

}  // namespace cmpopt
