#pragma once

// Deterministic RNG streams. Every stochastic quantity in the library is drawn
// from an mt19937_64 whose seed is derived from (base_seed, trajectory_index,
// stream_id) by a splitmix64 hash, so a trajectory is reproducible bit for bit
// no matter in which order (or on how many threads) trajectories are run.
//
// std::uniform_real_distribution / std::normal_distribution are
// implementation-defined, so we draw uniforms from the top 53 bits ourselves
// and use Box-Muller for Gaussians.

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace majolyap {

// Named substreams of one trajectory. Keep the values stable: they are part of
// the reproducibility contract (a record produced by version X replays under
// version Y only if the derivation is unchanged).
inline constexpr std::uint64_t kStreamBorn = 1;          // measurement outcomes
inline constexpr std::uint64_t kStreamFrame = 2;         // Lyapunov frame init
inline constexpr std::uint64_t kStreamFramePartner = 3;  // twisted-partner frame init

inline std::uint64_t splitmix64(std::uint64_t& s) {
  s += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = s;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Order-sensitive hash of (base, trajectory, stream); two rounds of splitmix
// per word are plenty to decorrelate neighbouring seeds/indices.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t trajectory,
                                 std::uint64_t stream) {
  std::uint64_t s = base;
  std::uint64_t h = splitmix64(s);
  s ^= trajectory * 0xD1B54A32D192ED03ULL;
  h ^= splitmix64(s);
  s ^= stream * 0x8CB92BA72F3D8DD7ULL;
  h ^= splitmix64(s);
  std::uint64_t t = h;
  return splitmix64(t);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // uniform in [0, 1) with 53-bit resolution
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // standard normal via Box-Muller (one spare cached)
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  std::complex<double> complex_gaussian() {
    const double re = gaussian();
    const double im = gaussian();
    return {re, im};
  }

  std::uint64_t raw() { return gen_(); }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

inline Rng trajectory_rng(std::uint64_t base_seed, std::uint64_t trajectory,
                          std::uint64_t stream) {
  return Rng(derive_seed(base_seed, trajectory, stream));
}

}  // namespace majolyap
