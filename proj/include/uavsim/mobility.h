#pragma once

#include "uavsim/rng.h"
#include "uavsim/sim_time.h"

#include <variant>
#include <vector>

namespace uavsim {

struct Vec3
{
    double x{0}, y{0}, z{0};

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double k) const { return {x * k, y * k, z * k}; }
    bool operator==(const Vec3&) const = default;
    double Norm() const;
};

double Distance(const Vec3& a, const Vec3& b);

/// Telemetry state s(t): position, velocity, battery fraction.
struct UavState
{
    Vec3 p;
    Vec3 v;
    double battery{1.0};
};

/// Waypoint path flown at constant cruise speed, optionally dwelling at each
/// waypoint with zero velocity.
struct Trajectory
{
    std::vector<Vec3> waypoints;
    double cruiseSpeed{5.0};
    double dwellS{0.0};
    bool loop{true};
    double batteryDrainPerS{0.001};
};

/// Rectangle of the given size centred on `center`, flown at `altitude`.
Trajectory RectangleTrajectory(const Vec3& center,
                               double width,
                               double height,
                               double altitude,
                               double speed,
                               double dwellS);

/**
 * Constant-speed circular orbit. Distance sweeps use this so that the
 * horizontal UAV-to-base-station distance stays fixed for a whole run.
 */
class OrbitPath
{
  public:
    OrbitPath(const Vec3& center, double radius, double altitude, double speed);
    UavState At(SimTime t, double batteryDrainPerS) const;

  private:
    Vec3 m_center;
    double m_radius;
    double m_altitude;
    double m_speed;
};

/// Piecewise-linear position along a trajectory. Throws std::invalid_argument
/// for degenerate trajectories (repeated waypoints, non-positive speed).
class WaypointPath
{
  public:
    explicit WaypointPath(Trajectory traj);
    UavState At(SimTime t) const;
    const Trajectory& Get() const { return m_traj; }

  private:
    struct Segment
    {
        double start;   // leg departure time (s)
        double travel;  // leg flight time (s)
        Vec3 from, to;
    };

    Trajectory m_traj;
    std::vector<Segment> m_segments;
    double m_period{0};
};

/// Either a waypoint path or a fixed-radius orbit.
class UavMobility
{
  public:
    explicit UavMobility(WaypointPath path);
    UavMobility(OrbitPath orbit, double batteryDrainPerS);

    UavState At(SimTime t) const;

  private:
    std::variant<WaypointPath, OrbitPath> m_path;
    double m_drain{0};
};

struct GroundLayout
{
    Vec3 center;
    double radius{0};
    std::vector<Vec3> nodes;
};

/// n i.i.d. points uniform over a disc (r = R sqrt(u), theta = 2 pi w).
GroundLayout PlaceGroundNodes(int n, double radius, const Vec3& center, RngStream& rng);

} // namespace uavsim
