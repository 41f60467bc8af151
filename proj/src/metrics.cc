#include "uavsim/metrics.h"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

namespace uavsim {

PhiRecord
MakePhiRecord(uint64_t burstId,
              BurstKind kind,
              SimTime tau,
              uint64_t sizeBytes,
              std::vector<std::optional<SimTime>> deliveries)
{
    PhiRecord r;
    r.burstId = burstId;
    r.kind = kind;
    r.tau = tau;
    r.sizeBytes = sizeBytes;
    r.t = std::move(deliveries);
    r.omega.reserve(r.t.size());
    SimTime latest = tau;
    bool complete = true;
    for (const auto& t : r.t)
    {
        r.omega.push_back(t ? 1 : 0);
        if (t)
        {
            latest = std::max(latest, *t);
        }
        else
        {
            complete = false;
        }
    }
    if (complete)
    {
        r.delta = latest - tau;
    }
    r.emit.resize(r.t.size());
    r.layer.resize(r.t.size());
    return r;
}

void
CheckPhiRecord(const PhiRecord& r)
{
    if (r.t.size() != r.omega.size())
    {
        throw AccountingError(fmt::format("burst {}: |t| != |omega|", r.burstId));
    }
    SimTime latest = r.tau;
    bool complete = true;
    for (size_t n = 0; n < r.t.size(); ++n)
    {
        if ((r.omega[n] == 1) != r.t[n].has_value() || r.omega[n] > 1)
        {
            throw AccountingError(fmt::format("burst {} packet {}: omega/t mismatch", r.burstId, n));
        }
        if (r.t[n])
        {
            if (*r.t[n] < r.tau)
            {
                throw AccountingError(fmt::format("burst {} packet {}: delivered before emission", r.burstId, n));
            }
            latest = std::max(latest, *r.t[n]);
        }
        else
        {
            complete = false;
        }
    }
    if (complete != r.delta.has_value() || (complete && *r.delta != latest - r.tau))
    {
        throw AccountingError(fmt::format("burst {}: delta violates the max rule", r.burstId));
    }
}

uint64_t
PacketCounts::TotalDropped() const
{
    uint64_t s = 0;
    for (uint64_t d : dropped)
    {
        s += d;
    }
    return s;
}

uint64_t
PhiCollector::Register(const Burst& burst, uint64_t nPackets)
{
    Entry e;
    e.burst = burst;
    e.burst.nPackets = nPackets;
    e.packets.resize(nPackets);
    m_entries.push_back(std::move(e));
    return m_entries.size() - 1;
}

PhiCollector::PacketState&
PhiCollector::At(uint64_t burst, uint32_t packet)
{
    if (burst >= m_entries.size() || packet >= m_entries[burst].packets.size())
    {
        throw AccountingError(fmt::format("unknown packet {}/{}", burst, packet));
    }
    return m_entries[burst].packets[packet];
}

void
PhiCollector::OnEmit(uint64_t burst, uint32_t packet, SimTime t)
{
    PacketState& p = At(burst, packet);
    if (p.emit)
    {
        throw AccountingError(fmt::format("packet {}/{} emitted twice", burst, packet));
    }
    p.emit = t;
}

void
PhiCollector::OnDeliver(uint64_t burst, uint32_t packet, SimTime t)
{
    PacketState& p = At(burst, packet);
    if (p.deliver)
    {
        throw AccountingError(fmt::format("duplicate delivery of packet {}/{}", burst, packet));
    }
    if (p.drop != DropLayer::None)
    {
        throw AccountingError(fmt::format("packet {}/{} delivered after a drop", burst, packet));
    }
    p.deliver = t;
}

void
PhiCollector::OnDrop(uint64_t burst, uint32_t packet, DropLayer layer)
{
    PacketState& p = At(burst, packet);
    if (p.deliver || p.drop != DropLayer::None)
    {
        throw AccountingError(fmt::format("packet {}/{} dropped after reaching a final state", burst, packet));
    }
    if (layer == DropLayer::None)
    {
        throw AccountingError("drop reported without a layer");
    }
    p.drop = layer;
}

std::vector<PhiRecord>
PhiCollector::Finalize() const
{
    std::vector<PhiRecord> out;
    out.reserve(m_entries.size());
    for (size_t id = 0; id < m_entries.size(); ++id)
    {
        const Entry& e = m_entries[id];
        std::vector<std::optional<SimTime>> t;
        t.reserve(e.packets.size());
        for (const PacketState& p : e.packets)
        {
            t.push_back(p.deliver);
        }
        PhiRecord r = MakePhiRecord(id, e.burst.kind, e.burst.tau, e.burst.sizeBytes, std::move(t));
        for (size_t n = 0; n < e.packets.size(); ++n)
        {
            const PacketState& p = e.packets[n];
            r.emit[n] = p.emit;
            if (p.drop != DropLayer::None)
            {
                r.layer[n] = std::string(ToString(p.drop));
            }
            else if (!p.deliver)
            {
                r.layer[n] = "inflight";
            }
        }
        out.push_back(std::move(r));
    }
    return out;
}

PacketCounts
PhiCollector::Counts() const
{
    PacketCounts c;
    for (const Entry& e : m_entries)
    {
        for (const PacketState& p : e.packets)
        {
            ++c.emitted;
            if (p.deliver)
            {
                ++c.delivered;
            }
            else if (p.drop != DropLayer::None)
            {
                ++c.dropped[static_cast<size_t>(p.drop)];
            }
            else
            {
                ++c.inFlight;
            }
        }
    }
    return c;
}

void
PacketTally::Delivered()
{
    if (m_open == 0)
    {
        throw AccountingError("delivery without an open packet");
    }
    --m_open;
    ++m_counts.delivered;
}

void
PacketTally::Dropped(DropLayer layer)
{
    if (m_open == 0)
    {
        throw AccountingError("drop without an open packet");
    }
    --m_open;
    ++m_counts.dropped[static_cast<size_t>(layer)];
}

PacketCounts
PacketTally::Counts() const
{
    PacketCounts c = m_counts;
    c.inFlight = m_open;
    return c;
}

Stats
ComputeStats(std::vector<double> values)
{
    Stats s;
    s.n = values.size();
    if (values.empty())
    {
        return s;
    }
    double sum = 0;
    for (double v : values)
    {
        sum += v;
    }
    s.mean = sum / static_cast<double>(s.n);
    double sq = 0;
    for (double v : values)
    {
        sq += (v - s.mean) * (v - s.mean);
    }
    s.variance = sq / static_cast<double>(s.n);
    const size_t rank = static_cast<size_t>(std::ceil(0.95 * static_cast<double>(s.n)));
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(rank - 1), values.end());
    s.p95 = values[rank - 1];
    return s;
}

RunSummary
Summarize(const std::vector<PhiRecord>& records,
          const std::vector<ErrorSample>& errors,
          const PacketCounts& uav,
          const PacketCounts& exogenous,
          uint64_t seed)
{
    RunSummary s;
    s.seed = seed;
    std::vector<double> err;
    err.reserve(errors.size());
    for (const ErrorSample& e : errors)
    {
        err.push_back(e.error);
    }
    s.positionErrorM = ComputeStats(std::move(err));

    std::vector<double> task;
    std::vector<double> telem;
    uint64_t incomplete = 0;
    uint64_t telemPackets = 0;
    uint64_t telemDelivered = 0;
    for (const PhiRecord& r : records)
    {
        if (r.kind == BurstKind::Task)
        {
            ++s.taskBursts;
            if (r.delta)
            {
                task.push_back(r.delta->ToMillis());
            }
            else
            {
                ++incomplete;
            }
        }
        else if (r.kind == BurstKind::Telemetry)
        {
            if (r.delta)
            {
                telem.push_back(r.delta->ToMillis());
            }
            telemPackets += r.omega.size();
            for (uint8_t w : r.omega)
            {
                telemDelivered += w;
            }
        }
    }
    s.taskDelayMs = ComputeStats(std::move(task));
    s.telemetryDelayMs = ComputeStats(std::move(telem));
    s.incompleteTaskFraction = s.taskBursts ? static_cast<double>(incomplete) / static_cast<double>(s.taskBursts) : 0;
    s.deliveryRatio = uav.emitted ? static_cast<double>(uav.delivered) / static_cast<double>(uav.emitted) : 0;
    s.telemetryDeliveryRatio =
        telemPackets ? static_cast<double>(telemDelivered) / static_cast<double>(telemPackets) : 0;
    s.uavPackets = uav;
    s.exogenousPackets = exogenous;
    return s;
}

} // namespace uavsim
