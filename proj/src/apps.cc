#include "uavsim/apps.h"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <stdexcept>

namespace uavsim {

std::string_view
ToString(BurstKind kind)
{
    switch (kind)
    {
    case BurstKind::Telemetry:
        return "telemetry";
    case BurstKind::Task:
        return "task";
    case BurstKind::Exogenous:
        return "exogenous";
    }
    return "";
}

TelemetrySource::TelemetrySource(Simulator& sim,
                                 double freqHz,
                                 uint32_t payloadBytes,
                                 const UavMobility& uav,
                                 BurstSink sink)
    : m_sim(sim),
      m_freq(freqHz),
      m_payload(payloadBytes),
      m_uav(uav),
      m_sink(std::move(sink)),
      m_target(sim.RegisterTarget("app.telemetry"))
{
    if (!(freqHz > 0))
    {
        throw std::invalid_argument("telemetry frequency must be positive");
    }
    if (payloadBytes == 0)
    {
        throw std::invalid_argument("telemetry payload must be positive");
    }
}

SimTime
TelemetrySource::EmissionTime(uint64_t i, double freqHz)
{
    return SimTime::Micros(std::llround(static_cast<double>(i) * 1e6 / freqHz));
}

void
TelemetrySource::Start()
{
    m_sim.Schedule(EmissionTime(m_next, m_freq), m_target, [this] { Emit(); });
}

void
TelemetrySource::Emit()
{
    Burst b;
    b.index = m_next;
    b.kind = BurstKind::Telemetry;
    b.tau = m_sim.Now();
    b.sizeBytes = m_payload;
    b.payload = m_uav.At(b.tau);
    ++m_next;
    m_sim.Schedule(EmissionTime(m_next, m_freq), m_target, [this] { Emit(); });
    m_sink(std::move(b));
}

TaskSource::TaskSource(Simulator& sim, uint64_t bytes, SimTime period, BurstSink sink)
    : m_sim(sim),
      m_bytes(bytes),
      m_period(period),
      m_sink(std::move(sink)),
      m_target(sim.RegisterTarget("app.task"))
{
    if (bytes == 0)
    {
        throw std::invalid_argument("task size must be positive");
    }
    if (period <= SimTime::Zero())
    {
        throw std::invalid_argument("task period must be positive");
    }
}

void
TaskSource::Start()
{
    m_sim.Schedule(m_period, m_target, [this] { Emit(); });
}

void
TaskSource::Emit()
{
    Burst b;
    b.index = m_next++;
    b.kind = BurstKind::Task;
    b.tau = m_sim.Now();
    b.sizeBytes = m_bytes;
    m_sim.ScheduleIn(m_period, m_target, [this] { Emit(); });
    m_sink(std::move(b));
}

double
ExogenousSource::IntervalS(double rateBps, uint32_t packetBytes)
{
    return static_cast<double>(packetBytes) * 8.0 / rateBps;
}

ExogenousSource::ExogenousSource(Simulator& sim,
                                 int node,
                                 double rateBps,
                                 uint32_t packetBytes,
                                 RngStream& phaseRng,
                                 std::function<void(int, uint32_t)> send)
    : m_sim(sim),
      m_node(node),
      m_bytes(packetBytes),
      m_send(std::move(send)),
      m_target(sim.RegisterTarget(fmt::format("app.exogenous.{}", node)))
{
    if (!(rateBps > 0))
    {
        throw std::invalid_argument("exogenous rate must be positive");
    }
    if (packetBytes == 0)
    {
        throw std::invalid_argument("exogenous packet size must be positive");
    }
    m_interval = IntervalS(rateBps, packetBytes);
    m_phase = phaseRng.Uniform() * m_interval;
}

void
ExogenousSource::Start()
{
    m_sim.Schedule(SimTime::Seconds(m_phase), m_target, [this] { Emit(); });
}

void
ExogenousSource::Emit()
{
    ++m_count;
    // absolute schedule so rounding does not accumulate
    const SimTime next = SimTime::Seconds(m_phase + static_cast<double>(m_count) * m_interval);
    m_sim.Schedule(std::max(next, m_sim.Now()), m_target, [this] { Emit(); });
    m_send(m_node, m_bytes);
}

Estimator::Estimator(EstimatorMode mode)
    : m_mode(mode)
{
}

bool
Estimator::Ingest(const UavState& payload, SimTime snapshotTime, SimTime rxTime)
{
    if (m_last && snapshotTime < m_lastSnapshot)
    {
        return false;
    }
    m_last = payload;
    m_lastSnapshot = snapshotTime;
    m_lastRx = rxTime;
    return true;
}

Vec3
Estimator::PositionAt(SimTime t) const
{
    if (!m_last)
    {
        throw std::logic_error("estimate queried before the first update");
    }
    if (m_mode == EstimatorMode::ZeroOrderHold)
    {
        return m_last->p;
    }
    return m_last->p + m_last->v * (t - m_lastRx).ToSeconds();
}

double
PositionError(const Vec3& truth, const Vec3& estimate, bool planar)
{
    Vec3 d = truth - estimate;
    if (planar)
    {
        d.z = 0;
    }
    return d.Norm();
}

} // namespace uavsim
