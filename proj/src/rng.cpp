#include "repro/rng.hpp"

#include <cmath>

namespace repro {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t derive(std::uint64_t key, std::uint64_t id) {
  return mix64(key ^ mix64(id + kGolden));
}

}  // namespace

RngStream::RngStream(std::uint64_t seed) : state_(mix64(seed + kGolden)) {}

RngStream RngStream::child(std::uint64_t id) const {
  return RngStream(derive(state_, id), 0);
}

RngStream RngStream::child(std::uint64_t id1, std::uint64_t id2) const {
  return RngStream(derive(derive(state_, id1), id2), 0);
}

std::uint64_t RngStream::next_u64() {
  state_ += kGolden;
  return mix64(state_);
}

double RngStream::next_open01() {
  // 53 mantissa bits, offset keeps the value strictly inside (0, 1).
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::next_normal() {
  if (have_cached_) {
    have_cached_ = false;
    return cached_;
  }
  double u1 = next_open01();
  double u2 = next_open01();
  double r = std::sqrt(-2.0 * std::log(u1));
  double a = 6.283185307179586476925286766559 * u2;
  cached_ = r * std::sin(a);
  have_cached_ = true;
  return r * std::cos(a);
}

std::uint64_t RngStream::next_below(std::uint64_t bound) {
  // Rejection sampling over the top of the range removes modulo bias.
  std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t v = next_u64();
  while (v >= limit) v = next_u64();
  return v % bound;
}

Vector sample_gaussian(int n, RngStream& stream) {
  if (n < 1) fail(ErrorCode::invalid_argument, "sample_gaussian needs n >= 1");
  Vector out(n);
  for (int i = 0; i < n; ++i) out[i] = stream.next_normal();
  return out;
}

}  // namespace repro
