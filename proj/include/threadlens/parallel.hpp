#pragma once

#include <condition_variable>
#include <deque>
#include <map>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

#include "threadlens/line_reader.hpp"
#include "threadlens/records.hpp"

namespace threadlens {

// Maps chunks in parallel and consumes the results strictly in chunk order,
// so the pipeline output is identical for any worker count. Backpressure on
// both queues keeps memory bounded by O(threads) chunks.
template <class Local, class MapFn, class ConsumeFn>
Result<bool> process_line_chunks(const std::vector<std::string>& paths,
                                 int threads, MapFn map_fn,
                                 ConsumeFn consume_in_order,
                                 std::size_t chunk_bytes =
                                     ChunkedLineReader::kDefaultChunkBytes) {
  ChunkedLineReader reader(paths, chunk_bytes);

  if (threads <= 1) {
    while (true) {
      auto chunk = reader.next();
      if (!chunk) return chunk.error();
      if (!chunk->has_value()) return true;
      consume_in_order(map_fn(**chunk));
    }
  }

  struct Shared {
    std::mutex mu;
    std::condition_variable cv_in;
    std::condition_variable cv_out;
    std::deque<LineChunk> in_queue;
    std::map<std::size_t, Local> done;
    std::size_t next_consume = 0;
    std::size_t window = 0;
    bool in_closed = false;
    bool cancelled = false;
  } sh;
  sh.window = static_cast<std::size_t>(threads) * 2 + 1;

  auto worker = [&] {
    while (true) {
      LineChunk chunk;
      {
        std::unique_lock lk(sh.mu);
        sh.cv_in.wait(lk, [&] { return !sh.in_queue.empty() || sh.in_closed; });
        if (sh.in_queue.empty()) return;
        chunk = std::move(sh.in_queue.front());
        sh.in_queue.pop_front();
        sh.cv_in.notify_all();
      }
      const std::size_t idx = chunk.index;
      Local local = map_fn(chunk);
      {
        std::unique_lock lk(sh.mu);
        // Don't run far ahead of the consumer.
        sh.cv_out.wait(lk, [&] {
          return sh.cancelled || idx < sh.next_consume + sh.window;
        });
        if (!sh.cancelled) sh.done.emplace(idx, std::move(local));
        sh.cv_out.notify_all();
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int i = 0; i < threads; ++i) pool.emplace_back(worker);

  // Consumes every result whose turn has come. Caller holds the lock.
  auto drain_ready = [&](std::unique_lock<std::mutex>& lk) {
    while (!sh.done.empty() && sh.done.begin()->first == sh.next_consume) {
      Local local = std::move(sh.done.begin()->second);
      sh.done.erase(sh.done.begin());
      ++sh.next_consume;
      lk.unlock();
      consume_in_order(std::move(local));
      lk.lock();
      sh.cv_out.notify_all();
    }
  };

  std::optional<Error> io_error;
  std::size_t produced = 0;
  while (true) {
    auto chunk = reader.next();
    if (!chunk) {
      io_error = chunk.error();
      break;
    }
    if (!chunk->has_value()) break;
    ++produced;
    std::unique_lock lk(sh.mu);
    sh.cv_in.wait(lk, [&] { return sh.in_queue.size() < sh.window; });
    sh.in_queue.push_back(std::move(**chunk));
    sh.cv_in.notify_one();
    drain_ready(lk);
  }

  {
    std::unique_lock lk(sh.mu);
    sh.in_closed = true;
    if (io_error) sh.cancelled = true;
    sh.cv_in.notify_all();
    sh.cv_out.notify_all();
    while (!sh.cancelled && sh.next_consume < produced) {
      drain_ready(lk);
      if (sh.next_consume >= produced) break;
      sh.cv_out.wait(lk);
    }
  }
  for (auto& t : pool) t.join();

  if (io_error) return *io_error;
  return true;
}

// Static block partition over [0, n); fn(begin, end) runs on worker threads.
// Writers must target disjoint, index-addressed slots for determinism.
template <class Fn>
void parallel_for_blocks(std::size_t n, int threads, Fn fn) {
  if (n == 0) return;
  const auto nthreads = static_cast<std::size_t>(threads < 1 ? 1 : threads);
  if (nthreads == 1 || n < 2 * nthreads) {
    fn(std::size_t{0}, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  const std::size_t step = (n + nthreads - 1) / nthreads;
  for (std::size_t b = 0; b < n; b += step) {
    const std::size_t e = std::min(n, b + step);
    pool.emplace_back([&fn, b, e] { fn(b, e); });
  }
  for (auto& t : pool) t.join();
}

}  // namespace threadlens
