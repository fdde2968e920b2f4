#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <cstring>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace harmonet {

using Vec = Eigen::VectorXd;
using Point = Eigen::VectorXd;

// Caller passed inconsistent or invalid arguments (CLI exit code 1).
struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A numeric estimate failed to reach its configured tolerance (exit code 2).
struct AccuracyError : std::runtime_error {
  double estimate = 0.0;
  double std_error = 0.0;
  AccuracyError(const std::string& msg, double est, double se)
      : std::runtime_error(msg), estimate(est), std_error(se) {}
};

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Deterministic uniform/normal generator. std::mt19937_64 is pinned by the
// standard, but the distribution adapters are not, so we map the raw stream
// ourselves to keep outputs bit-identical across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9E3779B97F4A7C15ull) {
    for (int i = 0; i < 4; ++i) next();
  }

  std::uint64_t next() {
    // splitmix64
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1)
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  // uniform integer in [0, n)
  std::uint64_t index(std::uint64_t n) { return n ? next() % n : 0; }

  double normal() {
    // Box-Muller, one value per call; deterministic given the call sequence.
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 1e-300) u1 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
  }

 private:
  std::uint64_t state_;
};

inline std::uint64_t fnv1a64(const void* data, std::size_t n,
                             std::uint64_t h = 0xCBF29CE484222325ull) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001B3ull;
  }
  return h;
}

inline std::uint64_t hash_mix(std::uint64_t h, std::uint64_t v) {
  return fnv1a64(&v, sizeof v, h);
}

inline std::uint64_t hash_mix(std::uint64_t h, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof bits);
  return hash_mix(h, bits);
}

inline std::uint64_t hash_mix(std::uint64_t h, const std::string& s) {
  return fnv1a64(s.data(), s.size(), h);
}

inline std::uint64_t hash_mix(std::uint64_t h, const Vec& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) h = hash_mix(h, v[i]);
  return h;
}

// Fixed-tree pairwise summation: deterministic independent of chunking and
// more accurate than sequential accumulation on long sums.
inline double pairwise_sum(std::span<const double> x) {
  if (x.size() <= 8) {
    double s = 0.0;
    for (double v : x) s += v;
    return s;
  }
  const std::size_t half = x.size() / 2;
  return pairwise_sum(x.first(half)) + pairwise_sum(x.subspan(half));
}

inline double pairwise_sum(const std::vector<double>& x) {
  return pairwise_sum(std::span<const double>(x.data(), x.size()));
}

}  // namespace harmonet
