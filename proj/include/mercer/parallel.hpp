#pragma once

// Thread-count setting and a chunked parallel loop used for kernel sampling.
// Work items are independent, so results do not depend on the thread count.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace mercer {

namespace detail {

inline std::atomic<unsigned>& thread_setting() {
  static std::atomic<unsigned> n{0};
  return n;
}

}  // namespace detail

/// Parses a MERCER_THREADS-style value; returns 0 when absent or malformed.
inline unsigned parse_thread_count(const char* text) {
  if (text == nullptr || *text == '\0') return 0;
  try {
    std::size_t used = 0;
    const long v = std::stol(text, &used);
    if (used != std::char_traits<char>::length(text) || v < 1) return 0;
    return static_cast<unsigned>(std::min<long>(v, 1024));
  } catch (const std::exception&) {
    return 0;
  }
}

/// Sets the worker count for sampling loops; 0 restores the default.
inline void set_thread_count(unsigned n) { detail::thread_setting().store(n); }

/// Explicit setting if any, else MERCER_THREADS, else 1.
inline unsigned thread_count() {
  if (const unsigned n = detail::thread_setting().load(); n > 0) return n;
  if (const unsigned n = parse_thread_count(std::getenv("MERCER_THREADS")); n > 0) return n;
  return 1;
}

/// Calls body(i) for i in [begin, end). The first exception thrown by any
/// worker is rethrown on the calling thread.
template <class Body>
void parallel_for(std::size_t begin, std::size_t end, Body&& body) {
  if (end <= begin) return;
  const std::size_t count = end - begin;
  const std::size_t workers = std::min<std::size_t>(thread_count(), count);
  if (workers <= 1) {
    for (std::size_t i = begin; i < end; ++i) body(i);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  std::atomic<std::size_t> next{begin};
  const std::size_t chunk = std::max<std::size_t>(1, count / (8 * workers));
  auto work = [&] {
    for (;;) {
      const std::size_t lo = next.fetch_add(chunk);
      if (lo >= end) return;
      const std::size_t hi = std::min(end, lo + chunk);
      try {
        for (std::size_t i = lo; i < hi; ++i) body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(end);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace mercer
