#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace uavsim {

/// 64-bit FNV-1a, used to turn stream labels into seed material.
uint64_t HashLabel(std::string_view label);

/// SplitMix64 finalizer.
uint64_t Mix64(uint64_t x);

/**
 * Named pseudo-random substream. The generator is std::mt19937_64, whose
 * output sequence is fixed by the standard, and every distribution below is
 * implemented here rather than taken from <random>, so a given (seed, label)
 * produces the same draws on every platform.
 */
class RngStream
{
  public:
    RngStream(uint64_t rootSeed, std::string label);

    const std::string& Label() const { return m_label; }
    uint64_t Seed() const { return m_seed; }

    uint64_t NextU64() { return m_gen(); }
    /// Uniform in [0, 1).
    double Uniform();
    double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }
    /// Uniform integer in [0, maxInclusive].
    uint64_t UniformInt(uint64_t maxInclusive);
    double Normal(double mean, double stddev);
    bool Bernoulli(double p) { return Uniform() < p; }

  private:
    std::string m_label;
    uint64_t m_seed;
    std::mt19937_64 m_gen;
    bool m_haveSpare{false};
    double m_spare{0.0};
};

} // namespace uavsim
