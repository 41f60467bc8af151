#pragma once

#include "uavsim/mobility.h"
#include "uavsim/simulator.h"

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>

namespace uavsim {

enum class BurstKind
{
    Telemetry,
    Task,
    Exogenous,
};

std::string_view ToString(BurstKind kind);

/// Application-layer emission (tau_i, B_i) of N_i packets.
struct Burst
{
    uint64_t index{0};
    BurstKind kind{BurstKind::Telemetry};
    SimTime tau;
    uint64_t sizeBytes{0};
    uint64_t nPackets{0};
    std::optional<UavState> payload;  ///< telemetry snapshot s(tau)
};

using BurstSink = std::function<void(Burst)>;

/// Periodic telemetry: burst i (i >= 1) at tau_i = i / freq carrying s(tau_i).
class TelemetrySource
{
  public:
    /// Throws std::invalid_argument unless freqHz > 0 and payloadBytes > 0.
    TelemetrySource(Simulator& sim, double freqHz, uint32_t payloadBytes, const UavMobility& uav, BurstSink sink);

    void Start();
    static SimTime EmissionTime(uint64_t i, double freqHz);

  private:
    void Emit();

    Simulator& m_sim;
    double m_freq;
    uint32_t m_payload;
    const UavMobility& m_uav;
    BurstSink m_sink;
    TargetId m_target;
    uint64_t m_next{1};
};

/// Task offload: a burst of `bytes` at every multiple of the period.
class TaskSource
{
  public:
    /// Throws std::invalid_argument unless bytes > 0 and period > 0.
    TaskSource(Simulator& sim, uint64_t bytes, SimTime period, BurstSink sink);

    void Start();

  private:
    void Emit();

    Simulator& m_sim;
    uint64_t m_bytes;
    SimTime m_period;
    BurstSink m_sink;
    TargetId m_target;
    uint64_t m_next{1};
};

/// Constant-bit-rate ground-node traffic with a random initial phase.
class ExogenousSource
{
  public:
    /// Throws std::invalid_argument unless rateBps > 0 and packetBytes > 0.
    ExogenousSource(Simulator& sim,
                    int node,
                    double rateBps,
                    uint32_t packetBytes,
                    RngStream& phaseRng,
                    std::function<void(int node, uint32_t bytes)> send);

    void Start();
    /// packetBytes * 8 / rateBps, in seconds.
    static double IntervalS(double rateBps, uint32_t packetBytes);

  private:
    void Emit();

    Simulator& m_sim;
    int m_node;
    double m_interval;
    uint32_t m_bytes;
    double m_phase;
    std::function<void(int, uint32_t)> m_send;
    TargetId m_target;
    uint64_t m_count{0};
};

enum class EstimatorMode
{
    ZeroOrderHold,
    ConstantVelocity,
};

/// Remote state estimate s~(t) kept by the ground control station.
class Estimator
{
  public:
    explicit Estimator(EstimatorMode mode);

    /// Returns false (update ignored) when the snapshot is older than the
    /// latest one already applied.
    bool Ingest(const UavState& payload, SimTime snapshotTime, SimTime rxTime);
    bool HasEstimate() const { return m_last.has_value(); }
    /// Estimated position at t. Requires HasEstimate().
    Vec3 PositionAt(SimTime t) const;
    SimTime LastRx() const { return m_lastRx; }
    SimTime LastSnapshot() const { return m_lastSnapshot; }

  private:
    EstimatorMode m_mode;
    std::optional<UavState> m_last;
    SimTime m_lastRx;
    SimTime m_lastSnapshot;
};

/// Euclidean position error; `planar` ignores altitude.
double PositionError(const Vec3& truth, const Vec3& estimate, bool planar = false);

} // namespace uavsim
