#include "cmpopt/rng.hpp"

#include <vector>

namespace cmpopt {

namespace {

void push_u64(std::vector<std::uint32_t>& words, std::uint64_t v) {
  words.push_back(static_cast<std::uint32_t>(v & 0xffffffffu));
  words.push_back(static_cast<std::uint32_t>(v >> 32));
}

}  // namespace

Rng::Rng(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu), static_cast<std::uint32_t>(seed >> 32)};
  engine_.seed(seq);
}

Rng::Rng(std::seed_seq& seq) { engine_.seed(seq); }

Rng Rng::derive(std::uint64_t master, Stream stream, std::initializer_list<std::uint64_t> path) {
  std::vector<std::uint32_t> words;
  words.reserve(4 + 2 * path.size());
  push_u64(words, master);
  words.push_back(static_cast<std::uint32_t>(stream));
  // path length separates {1} from {1, 0}
  words.push_back(static_cast<std::uint32_t>(path.size()));
  for (auto v : path) push_u64(words, v);
  std::seed_seq seq(words.begin(), words.end());
  return Rng(seq);
}

std::uint64_t Rng::below(std::uint64_t n) {
  std::uniform_int_distribution<std::uint64_t> dist(0, n - 1);
  return dist(engine_);
}

}  // namespace cmpopt
