#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace tc {

// Chunk boundaries depend only on the range, never on the thread count, and
// chunk results are combined by a fixed pairwise tree. The result is therefore
// bit-identical for any number of threads.
inline constexpr std::size_t kReductionChunk = 4096;

template <class T>
T pairwise_reduce(std::vector<T> parts) {
  if (parts.empty()) return T{};
  while (parts.size() > 1) {
    std::vector<T> next;
    next.reserve((parts.size() + 1) / 2);
    for (std::size_t i = 0; i + 1 < parts.size(); i += 2) next.push_back(parts[i] + parts[i + 1]);
    if (parts.size() % 2) next.push_back(parts.back());
    parts = std::move(next);
  }
  return parts.front();
}

// Sum of f(i) over i in [begin, end).
template <class T, class F>
T deterministic_sum(std::size_t begin, std::size_t end, F&& f, unsigned threads = 1) {
  if (end <= begin) return T{};
  const std::size_t nchunks = (end - begin + kReductionChunk - 1) / kReductionChunk;
  std::vector<T> parts(nchunks);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t c; (c = next.fetch_add(1)) < nchunks;) {
      std::size_t lo = begin + c * kReductionChunk;
      std::size_t hi = std::min(end, lo + kReductionChunk);
      T acc{};
      for (std::size_t i = lo; i < hi; ++i) acc = acc + f(i);
      parts[c] = acc;
    }
  };
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(nchunks)));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  return pairwise_reduce(std::move(parts));
}

}  // namespace tc
