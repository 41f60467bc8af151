#include "uavsim/wifi_dcf.h"

#include <algorithm>
#include <fmt/format.h>
#include <stdexcept>

namespace uavsim {

SimTime
TxDuration(int payloadBytes, int mcs)
{
    const McsTable& table = WifiMcsTable();
    if (mcs < 0 || mcs >= table.Size())
    {
        throw std::invalid_argument(fmt::format("invalid 802.11a MCS {}", mcs));
    }
    const int64_t bitsPerSymbol = static_cast<int64_t>(table.value[static_cast<size_t>(mcs)]);
    const int64_t bits = 16 + 8 * static_cast<int64_t>(payloadBytes) + 6;
    const int64_t symbols = (bits + bitsPerSymbol - 1) / bitsPerSymbol;
    return SimTime::Micros(20 + 4 * symbols);
}

int
ContentionWindowAfter(int failures, int cwMin, int cwMax)
{
    int64_t cw = cwMin;
    for (int i = 0; i < failures && cw < cwMax; ++i)
    {
        cw = 2 * cw + 1;
    }
    return static_cast<int>(std::min<int64_t>(cw, cwMax));
}

WifiNetwork::WifiNetwork(Simulator& sim, DcfParams params, RadioLinks links, int nNodes)
    : m_sim(sim),
      m_params(params),
      m_links(std::move(links)),
      m_nNodes(nNodes),
      m_target(sim.RegisterTarget("wifi.dcf")),
      m_errorRng(&sim.Stream("wifi.error"))
{
    const size_t n = static_cast<size_t>(nNodes) + 1;
    m_stations.resize(n);
    m_stats.resize(n);
    m_lastDraw.resize(n, 0);
    for (size_t i = 0; i < n; ++i)
    {
        m_stations[i].id = static_cast<int>(i);
        m_stations[i].contentionWindow = m_params.cwMin;
        m_backoffRng.push_back(&sim.Stream(fmt::format("wifi.backoff.{}", i)));
    }
}

void
WifiNetwork::Send(Direction dir, Packet packet)
{
    MacFrame frame;
    frame.payloadBytes = static_cast<int>(packet.bytes) + m_params.macOverheadBytes;
    frame.enqueueTime = m_sim.Now();
    if (dir == Direction::Uplink)
    {
        frame.source = packet.node;
        frame.destination = m_nNodes;
        const int idx = packet.node;
        frame.packet = std::move(packet);
        Enqueue(idx, std::move(frame));
    }
    else
    {
        frame.source = m_nNodes;
        frame.destination = packet.node;
        frame.packet = std::move(packet);
        Enqueue(m_nNodes, std::move(frame));
    }
}

void
WifiNetwork::Enqueue(int stationIdx, MacFrame frame)
{
    DcfStation& st = m_stations.at(static_cast<size_t>(stationIdx));
    if (static_cast<int>(st.txQueue.size()) >= m_params.queueFrames)
    {
        ++m_stats[static_cast<size_t>(stationIdx)].queueDrops;
        if (frame.packet.onDropped)
        {
            frame.packet.onDropped(DropLayer::Queue);
        }
        return;
    }
    const bool wasEmpty = st.txQueue.empty();
    st.txQueue.push_back(std::move(frame));
    if (wasEmpty && st.state == StationState::Idle)
    {
        StartContention(st);
        ScheduleResolve();
    }
}

int
WifiNetwork::DrawBackoff(DcfStation& st)
{
    const auto idx = static_cast<size_t>(st.id);
    const int b = static_cast<int>(m_backoffRng[idx]->UniformInt(static_cast<uint64_t>(st.contentionWindow)));
    m_lastDraw[idx] = b;
    return b;
}

void
WifiNetwork::StartContention(DcfStation& st)
{
    st.backoffCounter = DrawBackoff(st);
    st.headSince = m_sim.Now();
    st.state = m_busy ? StationState::Deferring : StationState::BackingOff;
    st.countFrom = std::max(m_sim.Now(), m_idleSince);
}

SimTime
WifiNetwork::ReadyTime(const DcfStation& st) const
{
    return st.countFrom + m_params.difs + m_params.slot * st.backoffCounter;
}

void
WifiNetwork::ScheduleResolve()
{
    if (m_busy)
    {
        return;
    }
    m_sim.Cancel(m_resolveEvent);
    m_resolveEvent = {};
    SimTime earliest = SimTime::Max();
    for (const DcfStation& st : m_stations)
    {
        if (!st.txQueue.empty())
        {
            earliest = std::min(earliest, ReadyTime(st));
        }
    }
    if (earliest != SimTime::Max())
    {
        m_resolveEvent = m_sim.Schedule(earliest, m_target, [this] { Resolve(); });
    }
}

LinkState
WifiNetwork::LinkFor(const MacFrame& frame) const
{
    if (frame.source == m_nNodes)
    {
        return m_links.Downlink(frame.destination, m_sim.Now());
    }
    return m_links.Uplink(frame.source, m_sim.Now());
}

void
WifiNetwork::Resolve()
{
    m_resolveEvent = {};
    const SimTime now = m_sim.Now();
    std::vector<int> transmitters;
    for (DcfStation& st : m_stations)
    {
        if (st.txQueue.empty())
        {
            continue;
        }
        if (ReadyTime(st) == now)
        {
            transmitters.push_back(st.id);
            st.backoffCounter = 0;
            continue;
        }
        // Freeze: only fully elapsed idle slots after DIFS count.
        const SimTime countStart = st.countFrom + m_params.difs;
        if (now > countStart)
        {
            const int64_t elapsed = (now - countStart).Us() / m_params.slot.Us();
            st.backoffCounter = static_cast<int>(std::max<int64_t>(0, st.backoffCounter - elapsed));
        }
        st.state = StationState::Deferring;
    }
    if (transmitters.empty())
    {
        ScheduleResolve();
        return;
    }

    m_busy = true;
    const bool collision = transmitters.size() > 1;
    SimTime dataEnd = now;
    m_active.clear();
    for (int idx : transmitters)
    {
        DcfStation& st = m_stations[static_cast<size_t>(idx)];
        MacFrame& frame = st.txQueue.front();
        const LinkState ls = LinkFor(frame);
        frame.mcs = ls.connected ? ls.mcs : 0;
        const SimTime dur = TxDuration(frame.payloadBytes, frame.mcs);
        TxRecord rec;
        rec.station = idx;
        rec.start = now;
        rec.end = now + dur;
        rec.mcs = frame.mcs;
        rec.backoffDrawn = m_lastDraw[static_cast<size_t>(idx)];
        rec.collided = collision;
        if (!collision)
        {
            const double per = PacketErrorProb(ls, frame.payloadBytes, m_links.channel->Config().perSoftnessDb);
            rec.success = !m_errorRng->Bernoulli(per);
        }
        st.state = StationState::Transmitting;
        dataEnd = std::max(dataEnd, rec.end);
        m_active.push_back(rec);
        if (rec.success && frame.packet.onDelivered)
        {
            auto deliver = frame.packet.onDelivered;
            frame.packet.onDelivered = nullptr;
            m_sim.Schedule(rec.end, m_target, std::move(deliver));
        }
    }
    const SimTime busyEnd = dataEnd + m_params.sifs + AckDuration();
    m_sim.Schedule(busyEnd, m_target, [this] { EndBusy(); });
}

void
WifiNetwork::EndBusy()
{
    const SimTime now = m_sim.Now();
    for (const TxRecord& rec : m_active)
    {
        if (m_txObserver)
        {
            m_txObserver(rec);
        }
        DcfStation& st = m_stations[static_cast<size_t>(rec.station)];
        DcfStationStats& stats = m_stats[static_cast<size_t>(rec.station)];
        bool frameDone = false;
        if (rec.success)
        {
            ++stats.successes;
            stats.accessDelaySumS += (now - st.headSince).ToSeconds();
            frameDone = true;
        }
        else
        {
            ++stats.failures;
            ++st.retryCount;
            if (st.retryCount > m_params.retryLimit)
            {
                ++stats.macDrops;
                MacFrame dropped = std::move(st.txQueue.front());
                st.txQueue.pop_front();
                st.retryCount = 0;
                st.contentionWindow = m_params.cwMin;
                if (dropped.packet.onDropped)
                {
                    dropped.packet.onDropped(DropLayer::Mac);
                }
            }
            else
            {
                st.contentionWindow = ContentionWindowAfter(st.retryCount, m_params.cwMin, m_params.cwMax);
                st.backoffCounter = DrawBackoff(st);
                st.state = StationState::BackingOff;
            }
        }
        if (frameDone)
        {
            st.txQueue.pop_front();
            st.retryCount = 0;
            st.contentionWindow = m_params.cwMin;
        }
        if (frameDone || st.retryCount == 0)
        {
            // either a new head-of-line frame or an empty queue
            if (st.txQueue.empty())
            {
                st.state = StationState::Idle;
            }
            else
            {
                st.backoffCounter = DrawBackoff(st);
                st.headSince = now;
                st.state = StationState::BackingOff;
            }
        }
    }
    m_active.clear();
    m_busy = false;
    m_idleSince = now;
    for (DcfStation& st : m_stations)
    {
        if (!st.txQueue.empty())
        {
            st.countFrom = now;
            if (st.state == StationState::Deferring)
            {
                st.state = StationState::BackingOff;
            }
        }
    }
    ScheduleResolve();
}

} // namespace uavsim
