#pragma once

#include <cstdint>
#include <random>

namespace specband {

// Mersenne Twister 64; its output sequence is fixed by the C++ standard.
using Rng = std::mt19937_64;

// Independent stream for a (seed, a, b) key, e.g. (seed, epoch_id,
// replicate). Keys are mixed with SplitMix64 so that results do not depend
// on the order in which parallel workers consume streams.
Rng make_stream(std::uint64_t seed, std::uint64_t a = 0, std::uint64_t b = 0);

std::uint64_t splitmix64(std::uint64_t x) noexcept;

// Distributions come from Boost.Random, whose algorithms (unlike the
// std:: ones) are identical on every platform.
double standard_normal(Rng& rng);
double uniform_real(Rng& rng, double lo, double hi);
std::int64_t uniform_index(Rng& rng, std::int64_t lo, std::int64_t hi);  // inclusive
// Number of trials up to and including the first success, P(success) = p.
std::int64_t geometric_trials(Rng& rng, double p);

}  // namespace specband
