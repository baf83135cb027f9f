#pragma once

#include <cmath>
#include <cstdint>

namespace rparp {

namespace detail {

// splitmix64 (Vigna). Used to expand seeds into xoshiro state.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace detail

// xoshiro256++ stream seeded from (master_seed, stream_id). Replicate k of an
// ensemble always uses substream(master, k), so serial and parallel runs
// produce identical draws.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& w : state_) w = detail::splitmix64(sm);
  }

  static RngStream substream(std::uint64_t master_seed, std::uint64_t stream_id) {
    std::uint64_t sm = master_seed;
    std::uint64_t a = detail::splitmix64(sm);
    // fold the stream id through one more mixing round
    std::uint64_t b = stream_id + 0x9e3779b97f4a7c15ULL;
    b = (b ^ (b >> 30)) * 0xbf58476d1ce4e5b9ULL;
    b = (b ^ (b >> 27)) * 0x94d049bb133111ebULL;
    return RngStream(a ^ (b ^ (b >> 31)));
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = detail::rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = detail::rotl(state_[3], 45);
    return result;
  }

  // uniform on (0,1); never returns an endpoint
  double uniform() {
    double u;
    do {
      u = (next_u64() >> 11) * 0x1.0p-53;
    } while (u <= 0.0);
    return u;
  }

  // standard normal via Marsaglia polar, one spare cached
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    has_spare_ = true;
    return u * m;
  }

  double exponential() { return -std::log(uniform()); }

  // integer in [0, n)
  std::uint64_t below(std::uint64_t n) {
    // Lemire-style rejection to stay unbiased
    std::uint64_t x = next_u64();
    __uint128_t m = static_cast<__uint128_t>(x) * n;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < n) {
      const std::uint64_t threshold = -n % n;
      while (lo < threshold) {
        x = next_u64();
        m = static_cast<__uint128_t>(x) * n;
        lo = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

 private:
  std::uint64_t state_[4];
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace rparp
