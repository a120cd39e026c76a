#pragma once

#include <cstdint>

#include "repro/types.hpp"

namespace repro {

// Substream tags used to key independent random streams off one user seed.
// Every consumer derives its stream as root(seed).child(tag, ...), so the
// draws a component sees depend only on (seed, tag, indices) and never on
// scheduling or on how much randomness other components consumed.
namespace stream_tag {
constexpr std::uint64_t search = 1;
constexpr std::uint64_t model_cs = 2;
constexpr std::uint64_t bootstrap = 3;
constexpr std::uint64_t generate = 4;
constexpr std::uint64_t replication = 5;
constexpr std::uint64_t functional = 6;
constexpr std::uint64_t cv_folds = 7;
}  // namespace stream_tag

// Keyed counter generator: the key is a hash of (seed, child ids...) and
// outputs come from the splitmix64 sequence under that key. Identical
// (seed, ids) give bit-identical output on every platform.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  // Derives an independent substream; does not advance this stream.
  RngStream child(std::uint64_t id) const;
  RngStream child(std::uint64_t id1, std::uint64_t id2) const;

  std::uint64_t next_u64();
  // Uniform on the open interval (0, 1).
  double next_open01();
  // Standard normal via Box-Muller; pairs are cached.
  double next_normal();
  // Uniform integer in [0, bound) by rejection, bound >= 1.
  std::uint64_t next_below(std::uint64_t bound);

 private:
  RngStream(std::uint64_t key, int) : state_(key) {}
  std::uint64_t state_;
  bool have_cached_ = false;
  double cached_ = 0.0;
};

// n i.i.d. standard normals drawn from the stream.
Vector sample_gaussian(int n, RngStream& stream);

}  // namespace repro
