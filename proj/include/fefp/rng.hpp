#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace fefp {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
/// A draw is a pure function of (key, counter), so each particle can own an
/// independent stream addressed by (seed, step, particle id) with no shared state.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr Counter generate(Counter ctr, Key key) noexcept {
    for (int round = 0; round < 10; ++round) {
      ctr = single_round(ctr, key);
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  static constexpr Counter single_round(const Counter& c, const Key& k) noexcept {
    const std::uint64_t p0 = std::uint64_t{kMul0} * c[0];
    const std::uint64_t p1 = std::uint64_t{kMul1} * c[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
};

/// Purpose tags keep streams used for different random decisions disjoint.
enum class StreamTag : std::uint32_t {
  kVelocityNoise = 1,
  kInitialVelocity = 2,
  kInitialPosition = 3,
  kBoundary = 4,
  kInflow = 5,
  kTest = 99,
};

/// A deterministic random stream for one (seed, step, entity, purpose) tuple.
/// Successive calls advance an internal block index, each block yielding four
/// 32-bit words.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t step, std::uint64_t entity, StreamTag tag) noexcept
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        entity_(entity),
        step_hi_(static_cast<std::uint32_t>(step) ^ (static_cast<std::uint32_t>(tag) << 24) ^
                 static_cast<std::uint32_t>(step >> 32) * 0x9E3779B9u) {}

  /// Uniform in the open interval (0, 1).
  double uniform() noexcept {
    if (pos_ == 4) refill();
    const std::uint32_t word = buf_[pos_++];
    return (static_cast<double>(word) + 0.5) * 0x1p-32;
  }

  /// Standard normal via Box-Muller; caches the second variate.
  double normal() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(phi);
    has_spare_ = true;
    return r * std::cos(phi);
  }

 private:
  void refill() noexcept {
    const Philox4x32::Counter ctr{static_cast<std::uint32_t>(entity_),
                                  static_cast<std::uint32_t>(entity_ >> 32), step_hi_, block_++};
    buf_ = Philox4x32::generate(ctr, key_);
    pos_ = 0;
  }

  Philox4x32::Key key_;
  std::uint64_t entity_;
  std::uint32_t step_hi_;
  std::uint32_t block_ = 0;
  Philox4x32::Counter buf_{};
  int pos_ = 4;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Three standard normals for one particle in one step; a single Philox block.
inline std::array<double, 3> particle_normals(std::uint64_t seed, std::uint64_t step,
                                              std::uint64_t particle_id) noexcept {
  const Philox4x32::Key key{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  const Philox4x32::Counter ctr{static_cast<std::uint32_t>(particle_id),
                                static_cast<std::uint32_t>(particle_id >> 32),
                                static_cast<std::uint32_t>(step),
                                static_cast<std::uint32_t>(StreamTag::kVelocityNoise) << 24 |
                                    (static_cast<std::uint32_t>(step >> 32) & 0xFFFFFFu)};
  const auto w = Philox4x32::generate(ctr, key);
  auto u = [](std::uint32_t x) { return (static_cast<double>(x) + 0.5) * 0x1p-32; };
  const double r0 = std::sqrt(-2.0 * std::log(u(w[0])));
  const double r1 = std::sqrt(-2.0 * std::log(u(w[2])));
  const double p0 = 2.0 * std::numbers::pi * u(w[1]);
  const double p1 = 2.0 * std::numbers::pi * u(w[3]);
  return {r0 * std::cos(p0), r0 * std::sin(p0), r1 * std::cos(p1)};
}

}  // namespace fefp
