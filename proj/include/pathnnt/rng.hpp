#pragma once

#include <array>
#include <cstdint>

namespace pathnnt {

/// Philox4x32-10 block cipher output for one 128-bit counter / 64-bit key.
std::array<std::uint32_t, 4> philox4x32(const std::array<std::uint32_t, 4>& counter,
                                        const std::array<std::uint32_t, 2>& key);

/// Counter-based random stream keyed by (seed, replication).
///
/// Every draw is a pure function of (seed, replication, stream, index), so
/// any subset of draws can be regenerated in any order on any number of
/// threads. Streams separate the random variables of the data-generating
/// process; indices enumerate subjects. The replication value must stay
/// below 2^60; the top four counter bits carry the stream id.
class CounterRng {
public:
  CounterRng(std::uint64_t seed, std::uint64_t replication);

  /// Uniform draw in the open interval (0, 1) with 53-bit resolution.
  double uniform(std::uint32_t stream, std::uint64_t index) const;

  /// Standard normal draw via the inverse CDF.
  double normal(std::uint32_t stream, std::uint64_t index) const;

  /// Bernoulli draw: uniform(stream, index) < p.
  bool bernoulli(std::uint32_t stream, std::uint64_t index, double p) const;

private:
  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 2> rep_words_;
};

/// Stream ids used by the simulator.
namespace stream {
constexpr std::uint32_t kConfounder = 0;
constexpr std::uint32_t kExposure = 1;
constexpr std::uint32_t kMediator = 2;
constexpr std::uint32_t kOutcome = 3;
}  // namespace stream

}  // namespace pathnnt
