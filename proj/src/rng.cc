#include "uavsim/rng.h"

#include <cmath>
#include <numbers>

namespace uavsim {

uint64_t
HashLabel(std::string_view label)
{
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : label)
    {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

uint64_t
Mix64(uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

RngStream::RngStream(uint64_t rootSeed, std::string label)
    : m_label(std::move(label)),
      m_seed(Mix64(rootSeed ^ Mix64(HashLabel(m_label)))),
      m_gen(m_seed)
{
}

double
RngStream::Uniform()
{
    return static_cast<double>(m_gen() >> 11) * 0x1.0p-53;
}

uint64_t
RngStream::UniformInt(uint64_t maxInclusive)
{
    if (maxInclusive == UINT64_MAX)
    {
        return m_gen();
    }
    const uint64_t range = maxInclusive + 1;
    const uint64_t limit = UINT64_MAX - (UINT64_MAX % range);
    uint64_t x;
    do
    {
        x = m_gen();
    } while (x >= limit);
    return x % range;
}

double
RngStream::Normal(double mean, double stddev)
{
    if (m_haveSpare)
    {
        m_haveSpare = false;
        return mean + stddev * m_spare;
    }
    // Box-Muller; 1 - U keeps the log argument in (0, 1].
    const double u1 = 1.0 - Uniform();
    const double u2 = Uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    m_spare = r * std::sin(theta);
    m_haveSpare = true;
    return mean + stddev * r * std::cos(theta);
}

} // namespace uavsim
