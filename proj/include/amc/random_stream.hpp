#pragma once

#include <cstdint>
#include <random>

namespace amc {

/// Seeded Gaussian/uniform source. Each simulation trial owns one; streams
/// for different trials are derived from (seed, index) so results do not
/// depend on execution order.
class RandomStream {
  public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    static RandomStream substream(std::uint64_t seed, std::uint64_t index);

    double gaussian() { return normal_(engine_); }
    double uniform() { return uniform_(engine_); }

  private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

std::uint64_t splitmix64(std::uint64_t x);

} // namespace amc
