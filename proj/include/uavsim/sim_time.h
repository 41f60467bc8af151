#pragma once

#include <compare>
#include <cstdint>
#include <limits>

namespace uavsim {

/// Simulation time with 1 us resolution. Integer time keeps event ordering
/// independent of floating-point rounding.
class SimTime
{
  public:
    constexpr SimTime() = default;

    static constexpr SimTime Micros(int64_t us) { return SimTime(us); }
    static constexpr SimTime Millis(int64_t ms) { return SimTime(ms * 1000); }
    static constexpr SimTime Seconds(double s)
    {
        return SimTime(static_cast<int64_t>(s * 1e6 + (s >= 0 ? 0.5 : -0.5)));
    }
    static constexpr SimTime Zero() { return SimTime(0); }
    static constexpr SimTime Max() { return SimTime(std::numeric_limits<int64_t>::max()); }

    constexpr int64_t Us() const { return m_us; }
    constexpr double ToSeconds() const { return static_cast<double>(m_us) * 1e-6; }
    constexpr double ToMillis() const { return static_cast<double>(m_us) * 1e-3; }

    constexpr auto operator<=>(const SimTime&) const = default;

    constexpr SimTime operator+(SimTime o) const { return SimTime(m_us + o.m_us); }
    constexpr SimTime operator-(SimTime o) const { return SimTime(m_us - o.m_us); }
    constexpr SimTime operator*(int64_t k) const { return SimTime(m_us * k); }
    constexpr SimTime& operator+=(SimTime o)
    {
        m_us += o.m_us;
        return *this;
    }

  private:
    constexpr explicit SimTime(int64_t us)
        : m_us(us)
    {
    }

    int64_t m_us{0};
};

} // namespace uavsim
