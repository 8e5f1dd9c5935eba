#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace rdeg {

/// Deterministic random stream bound to a (master_seed, item_id, stage)
/// provenance triple.
///
/// Seeding: SHA-256 over
///   seed as 8 little-endian bytes
///   || u64le(len(item_id)) || item_id
///   || u64le(len(stage))   || stage
/// The eight little-endian 32-bit words of the digest feed std::seed_seq,
/// which seeds std::mt19937_64. Both are fully specified by the C++ standard,
/// and every distribution below is computed here rather than through
/// <random>'s implementation-defined distributions, so draws are identical
/// across platforms.
///
/// A stream is single-consumer. Copying it forks the state.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::string item_id, std::string stage);

  std::uint64_t master_seed() const noexcept { return seed_; }
  const std::string& item_id() const noexcept { return item_id_; }
  const std::string& stage() const noexcept { return stage_; }

  /// Independent stream with stage "<stage>/<child>".
  RngStream substream(std::string_view child) const;

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi);
  /// Uniform integer on the closed range [lo, hi], unbiased.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  bool bernoulli(double p);
  /// Standard normal via the Marsaglia polar method.
  double normal();

 private:
  std::uint64_t seed_;
  std::string item_id_;
  std::string stage_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Pure function of the triple; equal triples give bitwise-equal streams.
RngStream derive_rng(std::uint64_t master_seed, std::string_view item_id,
                     std::string_view stage);

}  // namespace rdeg
