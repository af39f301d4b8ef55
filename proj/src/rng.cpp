#include "pathnnt/rng.hpp"

#include <stdexcept>

#include "pathnnt/links.hpp"

namespace pathnnt {

namespace {

constexpr std::uint32_t kMult0 = 0xD2511F53u;
constexpr std::uint32_t kMult1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void philox_round(std::array<std::uint32_t, 4>& c,
                         const std::array<std::uint32_t, 2>& k) {
  const std::uint64_t p0 = static_cast<std::uint64_t>(kMult0) * c[0];
  const std::uint64_t p1 = static_cast<std::uint64_t>(kMult1) * c[2];
  const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
  const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
  const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
  const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
  c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(const std::array<std::uint32_t, 4>& counter,
                                        const std::array<std::uint32_t, 2>& key) {
  std::array<std::uint32_t, 4> c = counter;
  std::array<std::uint32_t, 2> k = key;
  for (int round = 0; round < 10; ++round) {
    philox_round(c, k);
    k[0] += kWeyl0;
    k[1] += kWeyl1;
  }
  return c;
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t replication)
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
      rep_words_{static_cast<std::uint32_t>(replication),
                 static_cast<std::uint32_t>(replication >> 32)} {
  if (rep_words_[1] >> 28 != 0) {
    throw std::invalid_argument("replication id must be below 2^60");
  }
}

double CounterRng::uniform(std::uint32_t stream, std::uint64_t index) const {
  const std::array<std::uint32_t, 4> counter = {
      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
      rep_words_[0], rep_words_[1] | (stream << 28)};
  const auto words = philox4x32(counter, key_);
  const std::uint64_t bits =
      (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
  // 53 significant bits, offset by half an ulp: the result never touches
  // 0 or 1 exactly.
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::normal(std::uint32_t stream, std::uint64_t index) const {
  return normal_quantile(uniform(stream, index));
}

bool CounterRng::bernoulli(std::uint32_t stream, std::uint64_t index, double p) const {
  return uniform(stream, index) < p;
}

}  // namespace pathnnt
