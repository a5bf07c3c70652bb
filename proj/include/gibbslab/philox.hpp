#pragma once

#include <array>
#include <cstdint>

namespace gibbslab {

/// Philox4x64-10 counter-based generator (Salmon et al., SC'11).
/// Output is a pure function of (counter, key), so any schedule produces the same stream.
class Philox4x64 {
 public:
  using Counter = std::array<std::uint64_t, 4>;
  using Key = std::array<std::uint64_t, 2>;

  static Counter generate(Counter ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      ctr = single_round(ctr, key);
    }
    return ctr;
  }

 private:
  static constexpr std::uint64_t kMul0 = 0xD2E7470EE14C6C93ULL;
  static constexpr std::uint64_t kMul1 = 0xCA5A826395121157ULL;
  static constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
  static constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;

  static void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) {
    const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
    hi = static_cast<std::uint64_t>(p >> 64);
    lo = static_cast<std::uint64_t>(p);
  }

  static Counter single_round(const Counter& c, const Key& k) {
    std::uint64_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, c[0], hi0, lo0);
    mulhilo(kMul1, c[2], hi1, lo1);
    return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
};

/// Uniform double in [0, 1) from the top 53 bits.
inline double to_unit(std::uint64_t x) { return static_cast<double>(x >> 11) * 0x1.0p-53; }

/// Random stream of one Markov chain: key = (seed, chain), counter = (sweep, site, purpose, 0).
class ChainRng {
 public:
  enum Purpose : std::uint64_t { kUpdate = 0, kInit = 1, kSiteChoice = 2 };

  ChainRng(std::uint64_t seed, std::uint64_t chain) : key_{seed, chain} {}

  Philox4x64::Counter block(std::uint64_t sweep, std::uint64_t site, Purpose purpose) const {
    return Philox4x64::generate({sweep, site, purpose, 0}, key_);
  }
  double uniform(std::uint64_t sweep, std::uint64_t site, Purpose purpose = kUpdate, int word = 0) const {
    return to_unit(block(sweep, site, purpose)[static_cast<std::size_t>(word)]);
  }

 private:
  Philox4x64::Key key_;
};

/// Stateless 64-bit mix used to derive per-point seeds (SplitMix64 finalizer).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace gibbslab
