#include "rdeg/rng.hpp"

#include <array>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <vector>

#include <sodium.h>

#include "rdeg/error.hpp"

namespace rdeg {
namespace {

void append_u64le(std::vector<unsigned char>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

std::mt19937_64 seeded_engine(std::uint64_t seed, std::string_view item_id,
                               std::string_view stage) {
  static std::once_flag init;
  std::call_once(init, [] {
    if (sodium_init() < 0) throw std::runtime_error("libsodium failed to initialise");
  });

  std::vector<unsigned char> message;
  message.reserve(24 + item_id.size() + stage.size());
  append_u64le(message, seed);
  append_u64le(message, item_id.size());
  message.insert(message.end(), item_id.begin(), item_id.end());
  append_u64le(message, stage.size());
  message.insert(message.end(), stage.begin(), stage.end());

  std::array<unsigned char, crypto_hash_sha256_BYTES> digest{};
  crypto_hash_sha256(digest.data(), message.data(), message.size());

  std::array<std::uint32_t, 8> words{};
  for (std::size_t w = 0; w < words.size(); ++w) {
    words[w] = static_cast<std::uint32_t>(digest[4 * w]) |
               static_cast<std::uint32_t>(digest[4 * w + 1]) << 8 |
               static_cast<std::uint32_t>(digest[4 * w + 2]) << 16 |
               static_cast<std::uint32_t>(digest[4 * w + 3]) << 24;
  }
  std::seed_seq seq(words.begin(), words.end());
  return std::mt19937_64(seq);
}

}  // namespace

RngStream::RngStream(std::uint64_t master_seed, std::string item_id, std::string stage)
    : seed_(master_seed),
      item_id_(std::move(item_id)),
      stage_(std::move(stage)),
      engine_(seeded_engine(seed_, item_id_, stage_)) {}

RngStream RngStream::substream(std::string_view child) const {
  std::string stage = stage_;
  stage += '/';
  stage += child;
  return RngStream(seed_, item_id_, std::move(stage));
}

std::uint64_t RngStream::next_u64() { return engine_(); }

double RngStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

std::int64_t RngStream::uniform_int(std::int64_t lo, std::int64_t hi) {
  if (hi < lo) throw ParameterError("uniform_int: empty range");
  const std::uint64_t span = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo);
  if (span == ~std::uint64_t{0}) return static_cast<std::int64_t>(next_u64());
  const std::uint64_t n = span + 1;
  // Reject the tail so every residue is equally likely.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n + 1) % n;
  std::uint64_t v;
  do {
    v = next_u64();
  } while (v > limit);
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(lo) + v % n);
}

bool RngStream::bernoulli(double p) {
  if (p <= 0.0) return false;
  if (p >= 1.0) return true;
  return uniform() < p;
}

double RngStream::normal() {
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
  const double factor = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * factor;
  has_spare_ = true;
  return u * factor;
}

RngStream derive_rng(std::uint64_t master_seed, std::string_view item_id,
                     std::string_view stage) {
  return RngStream(master_seed, std::string(item_id), std::string(stage));
}

}  // namespace rdeg
