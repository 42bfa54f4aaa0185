#include "specband/random.hpp"

#include <boost/random/geometric_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

namespace specband {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng make_stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  const std::uint64_t key = splitmix64(splitmix64(splitmix64(seed) ^ a) ^ b);
  std::seed_seq seq{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32),
                    static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b)};
  return Rng(seq);
}

double standard_normal(Rng& rng) {
  boost::random::normal_distribution<double> dist(0.0, 1.0);
  return dist(rng);
}

double uniform_real(Rng& rng, double lo, double hi) {
  boost::random::uniform_real_distribution<double> dist(lo, hi);
  return dist(rng);
}

std::int64_t uniform_index(Rng& rng, std::int64_t lo, std::int64_t hi) {
  boost::random::uniform_int_distribution<std::int64_t> dist(lo, hi);
  return dist(rng);
}

std::int64_t geometric_trials(Rng& rng, double p) {
  if (p >= 1.0) return 1;
  // Boost counts failures before the first success.
  boost::random::geometric_distribution<std::int64_t, double> dist(p);
  return dist(rng) + 1;
}

}  // namespace specband
