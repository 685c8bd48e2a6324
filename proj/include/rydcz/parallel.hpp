#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <optional>
#include <span>
#include <thread>
#include <vector>

namespace rydcz {

inline unsigned default_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

// Runs fn(i) for i in [0, n) on up to `workers` threads. Results are stored by
// index, so the output does not depend on scheduling. An exception thrown by
// fn(i) is kept in errors[i].
template <class R>
struct IndexedResults {
  std::vector<std::optional<R>> values;
  std::vector<std::exception_ptr> errors;
};

template <class Fn>
auto parallel_map(std::size_t n, unsigned workers, Fn&& fn) {
  using R = decltype(fn(std::size_t{}));
  IndexedResults<R> out;
  out.values.resize(n);
  out.errors.resize(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        out.values[i] = fn(i);
      } catch (...) {
        out.errors[i] = std::current_exception();
      }
    }
  };
  const unsigned w = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (w == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(w);
    for (unsigned k = 0; k < w; ++k) pool.emplace_back(work);
  }
  return out;
}

// rethrows the first stored exception, if any
template <class R>
std::vector<R> unwrap(IndexedResults<R>&& r) {
  std::vector<R> v;
  v.reserve(r.values.size());
  for (std::size_t i = 0; i < r.values.size(); ++i) {
    if (r.errors[i]) std::rethrow_exception(r.errors[i]);
    v.push_back(std::move(*r.values[i]));
  }
  return v;
}

// order-fixed pairwise summation
inline double pairwise_sum(std::span<const double> x) {
  if (x.size() <= 8) {
    double s = 0;
    for (double v : x) s += v;
    return s;
  }
  const std::size_t h = x.size() / 2;
  return pairwise_sum(x.first(h)) + pairwise_sum(x.subspan(h));
}

}  // namespace rydcz
