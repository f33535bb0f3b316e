#ifndef FR_COMMON_HPP
#define FR_COMMON_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace fr {

// ---------------------------------------------------------------------------
// Errors. DomainError covers invalid values at API boundaries, StructuralError
// covers inconsistent graph/index data, ParseError carries a position,
// InfeasibleError signals problems with no solution (e.g. no s-t path).
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class DomainError : public Error {
public:
  explicit DomainError(const std::string& msg) : Error(msg) {}
};

class StructuralError : public Error {
public:
  explicit StructuralError(const std::string& msg) : Error(msg) {}
};

class InfeasibleError : public Error {
public:
  explicit InfeasibleError(const std::string& msg) : Error(msg) {}
};

class ParseError : public Error {
public:
  ParseError(const std::string& msg, std::size_t position)
      : Error(msg + " (at position " + std::to_string(position) + ")"),
        pos(position) {}
  std::size_t pos;
};

class DegeneracyError : public Error {
public:
  explicit DegeneracyError(const std::string& msg) : Error(msg) {}
};

// Bad invocations and config-schema violations (CLI exit code 2).
class UsageError : public Error {
public:
  explicit UsageError(const std::string& msg) : Error(msg) {}
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw DomainError(msg);
}

// ---------------------------------------------------------------------------
// Numerics helpers.
// ---------------------------------------------------------------------------

constexpr double kInf = std::numeric_limits<double>::infinity();

inline double log_add_exp(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  const double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

inline double clamp(double v, double lo, double hi) {
  return std::min(std::max(v, lo), hi);
}

inline double linf_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double l1_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s;
}

inline double sum(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

// Bisection for a continuous function with f(lo) and f(hi) of opposite sign.
// Returns the midpoint after the bracket shrinks below xtol.
inline double bisect(const std::function<double(double)>& f, double lo, double hi,
                     double xtol = 1e-14, int max_iter = 200) {
  double flo = f(lo);
  if (flo == 0.0) return lo;
  double fhi = f(hi);
  if (fhi == 0.0) return hi;
  if ((flo > 0) == (fhi > 0))
    throw DomainError("bisect: endpoints do not bracket a root");
  for (int it = 0; it < max_iter && (hi - lo) > xtol; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0) == (fhi > 0)) {
      hi = mid;
      fhi = fm;
    } else {
      lo = mid;
      flo = fm;
    }
  }
  return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------
// Counter-based RNG streams. A stream is keyed by (seed, agent, day); draws
// within the stream come from splitmix64 iterates of the mixed key, so any
// (agent, day) cell can be generated independently of every other.
// ---------------------------------------------------------------------------

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class RngStream {
public:
  RngStream(std::uint64_t seed, std::uint64_t agent, std::uint64_t day) {
    std::uint64_t s = seed;
    state_ = splitmix64(s) ^ (agent * 0xD1B54A32D192ED03ULL) ^
             (day * 0x9E6C63D0876A9A47ULL);
    (void)splitmix64(state_);  // decorrelate nearby keys
  }

  std::uint64_t next_u64() { return splitmix64(state_); }

  // Uniform in [0, 1).
  double next_double() { return (next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n).
  std::uint32_t next_below(std::uint32_t n) {
    return static_cast<std::uint32_t>(next_u64() % n);
  }

  // Index sampled from an unnormalized nonnegative weight vector.
  int next_categorical(const std::vector<double>& w) {
    double total = 0.0;
    for (double x : w) total += x;
    double u = next_double() * total;
    for (std::size_t i = 0; i + 1 < w.size(); ++i) {
      u -= w[i];
      if (u < 0.0) return static_cast<int>(i);
    }
    return static_cast<int>(w.size()) - 1;
  }

private:
  std::uint64_t state_;
};

// ---------------------------------------------------------------------------
// Worker pool sizing and a simple deterministic parallel-for. FR_THREADS caps
// the number of workers; chunking is static so results never depend on the
// thread count.
// ---------------------------------------------------------------------------

inline unsigned worker_count() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("FR_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) hw = std::min<unsigned>(hw, static_cast<unsigned>(v));
  }
  return hw;
}

template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const unsigned workers = std::min<std::size_t>(worker_count(), n);
  if (workers <= 1 || n < 1024) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

// FNV-1a content hash used for output manifests.
inline std::uint64_t fnv1a64(const void* data, std::size_t n,
                             std::uint64_t h = 0xcbf29ce484222325ULL) {
  const unsigned char* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t fnv1a64(const std::string& s) {
  return fnv1a64(s.data(), s.size());
}

}  // namespace fr

#endif  // FR_COMMON_HPP
