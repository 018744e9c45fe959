#include "formvol/random.hpp"

#include <cmath>
#include <random>

#include "formvol/errors.hpp"

namespace formvol {

std::uint64_t mix64(std::uint64_t x) noexcept {
  // splitmix64 finalizer
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) noexcept {
  return mix64(mix64(seed) ^ mix64(tag + 0x632BE59BD9B4E019ULL));
}

CounterEngine::CounterEngine(std::uint64_t seed, std::uint64_t counter) noexcept
    : key_(mix64(mix64(seed) + 0xD1B54A32D192ED03ULL * (counter + 1))) {}

CounterEngine::result_type CounterEngine::operator()() noexcept {
  return mix64(key_ + 0x9E3779B97F4A7C15ULL * (++lane_));
}

void fill_normal(CounterEngine& engine, std::span<double> out) {
  std::normal_distribution<double> normal;
  for (double& v : out) v = normal(engine);
}

void sample_unit_vector(CounterEngine& engine, std::span<double> out) {
  double norm2 = 0.0;
  do {
    fill_normal(engine, out);
    norm2 = 0.0;
    for (double v : out) norm2 += v * v;
  } while (norm2 == 0.0);
  const double inv = 1.0 / std::sqrt(norm2);
  for (double& v : out) v *= inv;
}

SphereSampler::SphereSampler(int n, std::uint64_t seed, std::uint64_t counter)
    : n_(n), seed_(seed), counter_(counter) {
  if (n < 1) fail(ErrorCode::kDomain, "sphere dimension must be at least 1");
}

void SphereSampler::point_at(std::uint64_t counter, std::span<double> out) const {
  if (out.size() != static_cast<std::size_t>(n_)) fail(ErrorCode::kShape, "sphere point has wrong length");
  CounterEngine engine(seed_, counter);
  sample_unit_vector(engine, out);
}

std::vector<double> SphereSampler::next() {
  std::vector<double> x(static_cast<std::size_t>(n_));
  next(x);
  return x;
}

void SphereSampler::next(std::span<double> out) { point_at(counter_++, out); }

}  // namespace formvol
