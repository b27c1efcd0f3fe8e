#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace martlab {

// Identifies one random stream: path i of a run draws from stream
// (master, i). Derivation is arithmetic, so any worker can construct any
// stream directly and results do not depend on execution order.
struct Seed {
  std::uint64_t master = 0;
  std::uint64_t stream_index = 0;
};

inline Seed derive_stream(std::uint64_t master, std::uint64_t index) {
  return Seed{master, index};
}

namespace detail {

// splitmix64 finalizer; used to spread raw seed/tag bits over the key space.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline void mul_hi_lo(std::uint32_t a, std::uint32_t b, std::uint32_t* hi,
                      std::uint32_t* lo) {
  std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  *hi = static_cast<std::uint32_t>(p >> 32);
  *lo = static_cast<std::uint32_t>(p);
}

}  // namespace detail

// Derives an unrelated master seed for a named sub-experiment (checks, etc.)
// so independent stages never reuse path streams of the main run.
inline std::uint64_t derive_master(std::uint64_t master, std::uint64_t tag) {
  return detail::splitmix64(master ^ detail::splitmix64(tag));
}

// Counter-based generator: Philox 4x32-10. The 128-bit counter is laid out
// as (block position, stream index), the 64-bit key is derived from the
// master seed, so streams are disjoint counter ranges under one key and the
// whole construction is a pure function of (master, stream_index, position).
class RngStream {
 public:
  RngStream(std::uint64_t master, std::uint64_t stream_index) {
    std::uint64_t k = detail::splitmix64(master);
    key_[0] = static_cast<std::uint32_t>(k);
    key_[1] = static_cast<std::uint32_t>(k >> 32);
    stream_lo_ = static_cast<std::uint32_t>(stream_index);
    stream_hi_ = static_cast<std::uint32_t>(stream_index >> 32);
  }
  explicit RngStream(Seed s) : RngStream(s.master, s.stream_index) {}

  std::uint64_t next_u64() {
    if (word_ >= 4) refill();
    std::uint64_t lo = block_[word_];
    std::uint64_t hi = block_[word_ + 1];
    word_ += 2;
    return (hi << 32) | lo;
  }

  // Uniform on [0,1), 53-bit resolution.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) {
    if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
      throw std::invalid_argument("uniform bounds must be finite with lo < hi");
    }
    return lo + (hi - lo) * uniform01();
  }

  // Box-Muller: exact Gaussian law, two variates per two uniforms. The
  // spare is cached, so draw parity affects how many counter words a call
  // consumes, never the distribution.
  double standard_normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    // u1 on (0,1] keeps the log finite.
    double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    double u2 = uniform01();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  double exponential(double rate) {
    if (!(rate > 0.0) || !std::isfinite(rate)) {
      throw std::invalid_argument("exponential rate must be positive finite");
    }
    double u = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    return -std::log(u) / rate;
  }

 private:
  void refill() {
    std::uint32_t c0 = static_cast<std::uint32_t>(pos_);
    std::uint32_t c1 = static_cast<std::uint32_t>(pos_ >> 32);
    std::uint32_t c2 = stream_lo_;
    std::uint32_t c3 = stream_hi_;
    std::uint32_t k0 = key_[0];
    std::uint32_t k1 = key_[1];
    for (int round = 0; round < 10; ++round) {
      std::uint32_t hi0, lo0, hi1, lo1;
      detail::mul_hi_lo(0xD2511F53u, c0, &hi0, &lo0);
      detail::mul_hi_lo(0xCD9E8D57u, c2, &hi1, &lo1);
      std::uint32_t n0 = hi1 ^ c1 ^ k0;
      std::uint32_t n1 = lo1;
      std::uint32_t n2 = hi0 ^ c3 ^ k1;
      std::uint32_t n3 = lo0;
      c0 = n0; c1 = n1; c2 = n2; c3 = n3;
      k0 += 0x9E3779B9u;  // Weyl key schedule
      k1 += 0xBB67AE85u;
    }
    block_[0] = c0; block_[1] = c1; block_[2] = c2; block_[3] = c3;
    ++pos_;
    word_ = 0;
  }

  std::array<std::uint32_t, 2> key_{};
  std::array<std::uint32_t, 4> block_{};
  std::uint32_t stream_lo_ = 0, stream_hi_ = 0;
  std::uint64_t pos_ = 0;
  int word_ = 4;  // force refill on first draw
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace martlab
