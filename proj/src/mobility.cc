#include "uavsim/mobility.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace uavsim {

double
Vec3::Norm() const
{
    return std::sqrt(x * x + y * y + z * z);
}

double
Distance(const Vec3& a, const Vec3& b)
{
    return (a - b).Norm();
}

Trajectory
RectangleTrajectory(const Vec3& center,
                    double width,
                    double height,
                    double altitude,
                    double speed,
                    double dwellS)
{
    const double hw = width / 2;
    const double hh = height / 2;
    Trajectory t;
    t.waypoints = {
        {center.x - hw, center.y - hh, altitude},
        {center.x + hw, center.y - hh, altitude},
        {center.x + hw, center.y + hh, altitude},
        {center.x - hw, center.y + hh, altitude},
    };
    t.cruiseSpeed = speed;
    t.dwellS = dwellS;
    t.loop = true;
    return t;
}

WaypointPath::WaypointPath(Trajectory traj)
    : m_traj(std::move(traj))
{
    if (m_traj.cruiseSpeed <= 0)
    {
        throw std::invalid_argument("trajectory cruise speed must be positive");
    }
    if (m_traj.waypoints.empty())
    {
        throw std::invalid_argument("trajectory has no waypoints");
    }
    const auto& wp = m_traj.waypoints;
    const size_t legs = m_traj.loop ? wp.size() : wp.size() - 1;
    double t = 0;
    for (size_t i = 0; i < legs; ++i)
    {
        const Vec3& a = wp[i];
        const Vec3& b = wp[(i + 1) % wp.size()];
        const double len = Distance(a, b);
        if (len <= 0)
        {
            throw std::invalid_argument("consecutive waypoints must be distinct");
        }
        // Fly the leg, then dwell at its arrival waypoint.
        m_segments.push_back(Segment{t, len / m_traj.cruiseSpeed, a, b});
        t += len / m_traj.cruiseSpeed + m_traj.dwellS;
    }
    m_period = t;
}

UavState
WaypointPath::At(SimTime time) const
{
    UavState s;
    const double tAbs = time.ToSeconds();
    s.battery = std::clamp(1.0 - m_traj.batteryDrainPerS * tAbs, 0.0, 1.0);
    if (m_segments.empty())
    {
        s.p = m_traj.waypoints.front();
        return s;
    }
    double t = tAbs;
    if (m_traj.loop)
    {
        t = std::fmod(t, m_period);
    }
    else if (t >= m_period)
    {
        s.p = m_traj.waypoints.back();
        return s;
    }
    for (const Segment& seg : m_segments)
    {
        if (t < seg.start)
        {
            // dwelling at the arrival waypoint of the previous leg
            s.p = seg.from;
            return s;
        }
        if (t < seg.start + seg.travel)
        {
            const double frac = (t - seg.start) / seg.travel;
            s.p = seg.from + (seg.to - seg.from) * frac;
            s.v = (seg.to - seg.from) * (1.0 / seg.travel);
            return s;
        }
    }
    s.p = m_segments.back().to;
    return s;
}

OrbitPath::OrbitPath(const Vec3& center, double radius, double altitude, double speed)
    : m_center(center),
      m_radius(radius),
      m_altitude(altitude),
      m_speed(speed)
{
    if (radius <= 0 || speed < 0)
    {
        throw std::invalid_argument("orbit radius must be positive and speed non-negative");
    }
}

UavState
OrbitPath::At(SimTime time, double batteryDrainPerS) const
{
    const double t = time.ToSeconds();
    const double omega = m_speed / m_radius;
    const double th = omega * t;
    UavState s;
    s.p = {m_center.x + m_radius * std::cos(th), m_center.y + m_radius * std::sin(th), m_altitude};
    s.v = {-m_speed * std::sin(th), m_speed * std::cos(th), 0.0};
    s.battery = std::clamp(1.0 - batteryDrainPerS * t, 0.0, 1.0);
    return s;
}

UavMobility::UavMobility(WaypointPath path)
    : m_path(std::move(path))
{
}

UavMobility::UavMobility(OrbitPath orbit, double batteryDrainPerS)
    : m_path(orbit),
      m_drain(batteryDrainPerS)
{
}

UavState
UavMobility::At(SimTime t) const
{
    if (const auto* wp = std::get_if<WaypointPath>(&m_path))
    {
        return wp->At(t);
    }
    return std::get<OrbitPath>(m_path).At(t, m_drain);
}

GroundLayout
PlaceGroundNodes(int n, double radius, const Vec3& center, RngStream& rng)
{
    if (n < 0 || radius <= 0)
    {
        throw std::invalid_argument("ground layout needs n >= 0 and radius > 0");
    }
    GroundLayout layout;
    layout.center = center;
    layout.radius = radius;
    layout.nodes.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
    {
        const double r = radius * std::sqrt(rng.Uniform());
        const double th = 2.0 * std::numbers::pi * rng.Uniform();
        layout.nodes.push_back({center.x + r * std::cos(th), center.y + r * std::sin(th), center.z});
    }
    return layout;
}

} // namespace uavsim
