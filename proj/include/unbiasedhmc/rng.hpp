#pragma once

#include <array>
#include <cstdint>

#include <Eigen/Dense>

namespace uhmc {

// splitmix64 finalizer; the single mixing primitive used for stream derivation.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

// index-th output of a splitmix64 generator seeded at `seed`. Replicate r of
// a master seed runs on derive_stream(master, r); iteration n of a chain pair
// runs on a further derive_stream(pair_seed, n). This two-level layout is what
// makes replicate results independent of scheduling and lets a coupled kernel
// consume extra randomness (coupling machinery) without shifting the draws
// seen by the first chain on later iterations.
constexpr std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t index) noexcept {
  return mix64(seed + (index + 1) * 0x9e3779b97f4a7c15ULL);
}

// xoshiro256++ seeded through splitmix64. Tracks logical draw counts
// (uniforms and normals) so tests can assert per-step consumption contracts.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed) {
    std::uint64_t s = seed;
    for (auto& w : state_) {
      s += 0x9e3779b97f4a7c15ULL;
      w = mix64(s);
    }
  }

  static Rng for_replicate(std::uint64_t master_seed, std::uint64_t replicate) {
    return Rng(derive_stream(master_seed, replicate));
  }

  // child stream for iteration `index`; derivation depends only on the seed
  // this Rng was constructed with, not on how much has been drawn from it.
  Rng substream(std::uint64_t index) const { return Rng(derive_stream(seed_, index)); }

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64() noexcept {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // uniform on [0,1)
  double uniform() noexcept {
    ++n_uniforms_;
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // one standard normal via Box-Muller; always consumes exactly two raw words.
  double normal() noexcept {
    ++n_normals_;
    const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;  // (0,1]
    const double u2 = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;          // [0,1)
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  Eigen::VectorXd normal_vector(Eigen::Index d) {
    Eigen::VectorXd z(d);
    for (Eigen::Index i = 0; i < d; ++i) z[i] = normal();
    return z;
  }

  std::uint64_t uniform_count() const noexcept { return n_uniforms_; }
  std::uint64_t normal_count() const noexcept { return n_normals_; }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t seed_;
  std::array<std::uint64_t, 4> state_{};
  std::uint64_t n_uniforms_ = 0;
  std::uint64_t n_normals_ = 0;
};

}  // namespace uhmc
