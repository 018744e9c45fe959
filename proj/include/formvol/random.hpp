#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace formvol {

inline constexpr std::uint64_t kDefaultSeed = 1234567;

std::uint64_t mix64(std::uint64_t x) noexcept;

// Seed for an independent substream identified by `tag`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) noexcept;

// Counter-keyed bit generator satisfying UniformRandomBitGenerator. Every
// (seed, counter) pair names an independent stream, so sample k of an
// estimator is reproducible regardless of how the sample range is split.
class CounterEngine {
 public:
  using result_type = std::uint64_t;

  CounterEngine(std::uint64_t seed, std::uint64_t counter) noexcept;

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept;

 private:
  std::uint64_t key_;
  std::uint64_t lane_ = 0;
};

// Draws `out.size()` standard normals from `engine`.
void fill_normal(CounterEngine& engine, std::span<double> out);

// Uniform points on the unit sphere S^{n-1} (normalized Gaussian vectors).
class SphereSampler {
 public:
  SphereSampler(int n, std::uint64_t seed, std::uint64_t counter = 0);

  int dimension() const noexcept { return n_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t counter() const noexcept { return counter_; }

  // Point for an explicit stream position; does not advance the sampler.
  void point_at(std::uint64_t counter, std::span<double> out) const;

  std::vector<double> next();
  void next(std::span<double> out);

 private:
  int n_;
  std::uint64_t seed_;
  std::uint64_t counter_;
};

// Writes a uniformly random unit vector using `engine`.
void sample_unit_vector(CounterEngine& engine, std::span<double> out);

}  // namespace formvol
