#include "uavsim/transport.h"

#include <algorithm>
#include <cstdlib>

namespace uavsim {

uint64_t
SegmentCount(uint64_t bytes, uint64_t payloadPerPacket)
{
    return (bytes + payloadPerPacket - 1) / payloadPerPacket;
}

// ---------------------------------------------------------------------------

NewRenoSender::NewRenoSender(TcpParams params)
    : m_params(params),
      m_cwnd(static_cast<uint64_t>(params.initialCwndSegments) * params.mss),
      m_ssthresh(params.initialSsthresh),
      m_rto(params.initialRto)
{
}

void
NewRenoSender::SetWindow(uint64_t cwnd, uint64_t ssthresh)
{
    m_cwnd = cwnd;
    m_ssthresh = ssthresh;
}

CongestionState
NewRenoSender::State() const
{
    if (m_inFastRecovery)
    {
        return CongestionState::FastRecovery;
    }
    return m_cwnd < m_ssthresh ? CongestionState::SlowStart : CongestionState::CongestionAvoidance;
}

void
NewRenoSender::OnTransmit(uint64_t endSeq)
{
    m_sndNxt = std::max(m_sndNxt, endSeq);
}

NewRenoSender::AckResult
NewRenoSender::OnAck(uint64_t ack)
{
    const uint64_t mss = m_params.mss;
    AckResult r;
    if (ack > m_sndUna)
    {
        const uint64_t newly = ack - m_sndUna;
        m_sndUna = ack;
        m_sndNxt = std::max(m_sndNxt, m_sndUna);
        r.newAck = true;
        if (m_inFastRecovery)
        {
            if (ack >= m_recover)
            {
                m_cwnd = m_ssthresh;
                m_inFastRecovery = false;
                r.fullAck = true;
            }
            else
            {
                // partial ACK: deflate by the newly acked data, resend the next hole
                m_cwnd = (m_cwnd > newly ? m_cwnd - newly : 0) + mss;
                r.partialAck = true;
                r.retransmit = ack;
            }
        }
        else if (m_cwnd < m_ssthresh)
        {
            m_cwnd += mss;
        }
        else
        {
            m_cwnd += std::max<uint64_t>(1, mss * mss / m_cwnd);
        }
        m_dupAcks = 0;
        return r;
    }
    if (ack == m_sndUna && m_sndNxt > m_sndUna)
    {
        ++m_dupAcks;
        if (m_inFastRecovery)
        {
            m_cwnd += mss;
        }
        else if (m_dupAcks == 3 && ack >= m_recover)
        {
            m_ssthresh = std::max(FlightSize() / 2, 2 * mss);
            m_recover = m_sndNxt;
            m_cwnd = m_ssthresh + 3 * mss;
            m_inFastRecovery = true;
            r.enteredFastRecovery = true;
            r.retransmit = m_sndUna;
        }
    }
    return r;
}

uint64_t
NewRenoSender::OnRto()
{
    const uint64_t mss = m_params.mss;
    m_ssthresh = std::max(FlightSize() / 2, 2 * mss);
    m_cwnd = mss;
    m_recover = m_sndNxt;
    m_inFastRecovery = false;
    m_dupAcks = 0;
    m_rto = std::min(m_rto * 2, m_params.maxRto);
    m_sndNxt = m_sndUna;
    return m_sndUna;
}

void
NewRenoSender::OnRttSample(SimTime rtt)
{
    if (!m_srtt)
    {
        m_srtt = rtt;
        m_rttvar = SimTime::Micros(rtt.Us() / 2);
    }
    else
    {
        const int64_t err = std::llabs(m_srtt->Us() - rtt.Us());
        m_rttvar = SimTime::Micros((3 * m_rttvar.Us() + err) / 4);
        m_srtt = SimTime::Micros((7 * m_srtt->Us() + rtt.Us()) / 8);
    }
    const SimTime candidate = *m_srtt + SimTime::Micros(std::max<int64_t>(1, 4 * m_rttvar.Us()));
    m_rto = std::clamp(candidate, m_params.minRto, m_params.maxRto);
}

// ---------------------------------------------------------------------------

ReliableConnection::ReliableConnection(Simulator& sim,
                                       AccessNetwork& net,
                                       int node,
                                       TcpParams params,
                                       PacketListener* listener)
    : m_sim(sim),
      m_net(net),
      m_node(node),
      m_params(params),
      m_listener(listener),
      m_target(sim.RegisterTarget("tcp." + std::to_string(node))),
      m_sender(params)
{
}

bool
ReliableConnection::SendBurst(BurstRequest burst)
{
    const uint64_t n = PacketsFor(burst.bytes);
    if (n == 0)
    {
        if (burst.onComplete)
        {
            burst.onComplete();
        }
        return true;
    }
    if (m_appendEnd - m_sender.SndUna() + burst.bytes > m_params.sendBufferBytes)
    {
        for (uint32_t i = 0; i < n; ++i)
        {
            m_listener->OnDrop(burst.id, i, DropLayer::Queue);
        }
        return false;
    }
    uint64_t left = burst.bytes;
    for (uint32_t i = 0; i < n; ++i)
    {
        const uint64_t len = std::min<uint64_t>(left, m_params.mss);
        Segment seg;
        seg.start = m_appendEnd;
        seg.end = m_appendEnd + len;
        seg.burst = burst.id;
        seg.index = i;
        seg.last = i + 1 == n;
        m_segments.push_back(seg);
        m_appendEnd += len;
        left -= len;
    }
    if (burst.onComplete)
    {
        m_completions.emplace(burst.id, std::move(burst.onComplete));
    }
    TrySend();
    return true;
}

ReliableConnection::Segment*
ReliableConnection::FindSegment(uint64_t seq)
{
    auto it = std::lower_bound(m_segments.begin(), m_segments.end(), seq, [](const Segment& s, uint64_t v) {
        return s.start < v;
    });
    if (it == m_segments.end() || it->start != seq)
    {
        return nullptr;
    }
    return &*it;
}

void
ReliableConnection::TrySend()
{
    while (true)
    {
        Segment* seg = FindSegment(m_sender.SndNxt());
        if (seg == nullptr)
        {
            break;
        }
        const uint64_t flight = m_sender.FlightSize();
        if (flight > 0 && flight + (seg->end - seg->start) > m_sender.Cwnd())
        {
            break;
        }
        Transmit(*seg, seg->emitted);
        m_sender.OnTransmit(seg->end);
    }
    if (!m_timer.Valid() && m_sender.FlightSize() > 0)
    {
        RestartTimer();
    }
}

void
ReliableConnection::Transmit(Segment& seg, bool retransmission)
{
    const SimTime now = m_sim.Now();
    if (!seg.emitted)
    {
        seg.emitted = true;
        m_listener->OnEmit(seg.burst, seg.index, now);
    }
    if (retransmission)
    {
        ++m_retransmissions;
    }
    seg.sentAt = now;
    Packet p;
    p.node = m_node;
    p.bytes = static_cast<uint32_t>(seg.end - seg.start) + m_params.headerBytes;
    p.onDelivered = [this, copy = seg] { OnSegmentArrival(copy); };
    m_net.Send(Direction::Uplink, std::move(p));
}

void
ReliableConnection::OnSegmentArrival(const Segment& seg)
{
    const SimTime now = m_sim.Now();
    // timestamp echo: only segments at or below the last ACK update the echoed time
    if (seg.start <= m_lastAckSent && seg.sentAt >= m_tsRecent)
    {
        m_tsRecent = seg.sentAt;
    }
    if (seg.start == m_rcvNxt)
    {
        std::vector<Segment> ready{seg};
        m_rcvNxt = seg.end;
        for (auto it = m_outOfOrder.begin(); it != m_outOfOrder.end() && it->first <= m_rcvNxt;)
        {
            if (it->first == m_rcvNxt)
            {
                ready.push_back(it->second);
                m_rcvNxt = it->second.end;
            }
            it = m_outOfOrder.erase(it);
        }
        for (const Segment& s : ready)
        {
            m_listener->OnDeliver(s.burst, s.index, now);
            if (s.last)
            {
                if (auto c = m_completions.find(s.burst); c != m_completions.end())
                {
                    auto fn = std::move(c->second);
                    m_completions.erase(c);
                    fn();
                }
            }
        }
    }
    else if (seg.start > m_rcvNxt)
    {
        m_outOfOrder.emplace(seg.start, seg);
    }
    SendAck();
}

void
ReliableConnection::SendAck()
{
    m_lastAckSent = m_rcvNxt;
    Packet ack;
    ack.node = m_node;
    ack.bytes = m_params.ackBytes;
    ack.onDelivered = [this, a = m_rcvNxt, echo = m_tsRecent] { OnAckArrival(a, echo); };
    m_net.Send(Direction::Downlink, std::move(ack));
}

void
ReliableConnection::OnAckArrival(uint64_t ack, SimTime echo)
{
    if (ack > m_sender.SndUna())
    {
        m_sender.OnRttSample(m_sim.Now() - echo);
    }
    const NewRenoSender::AckResult r = m_sender.OnAck(ack);
    while (!m_segments.empty() && m_segments.front().end <= m_sender.SndUna())
    {
        m_segments.pop_front();
    }
    if (r.retransmit)
    {
        if (Segment* seg = FindSegment(*r.retransmit))
        {
            Transmit(*seg, true);
        }
    }
    if (r.newAck)
    {
        m_sim.Cancel(m_timer);
        m_timer = {};
    }
    TrySend();
}

void
ReliableConnection::RestartTimer()
{
    m_sim.Cancel(m_timer);
    m_timer = m_sim.ScheduleIn(m_sender.Rto(), m_target, [this] { OnTimer(); });
}

void
ReliableConnection::OnTimer()
{
    m_timer = {};
    if (m_sender.FlightSize() == 0)
    {
        return;
    }
    ++m_timeouts;
    const uint64_t seq = m_sender.OnRto();
    if (Segment* seg = FindSegment(seq))
    {
        Transmit(*seg, true);
        m_sender.OnTransmit(seg->end);
    }
    RestartTimer();
}

// ---------------------------------------------------------------------------

DatagramSocket::DatagramSocket(Simulator& sim,
                               AccessNetwork& net,
                               int node,
                               uint32_t payloadPerPacket,
                               uint32_t headerBytes,
                               PacketListener* listener)
    : m_sim(sim),
      m_net(net),
      m_node(node),
      m_payload(payloadPerPacket),
      m_header(headerBytes),
      m_listener(listener),
      m_target(sim.RegisterTarget("udp." + std::to_string(node)))
{
}

bool
DatagramSocket::SendBurst(BurstRequest burst)
{
    const uint64_t n = PacketsFor(burst.bytes);
    if (n == 0)
    {
        if (burst.onComplete)
        {
            burst.onComplete();
        }
        return true;
    }
    auto remaining = std::make_shared<uint64_t>(n);
    auto complete = std::make_shared<std::function<void()>>(std::move(burst.onComplete));
    uint64_t left = burst.bytes;
    for (uint32_t i = 0; i < n; ++i)
    {
        const uint64_t len = std::min<uint64_t>(left, m_payload);
        left -= len;
        Packet p;
        p.node = m_node;
        p.bytes = static_cast<uint32_t>(len) + m_header;
        const uint64_t id = burst.id;
        p.onDelivered = [this, id, i, remaining, complete] {
            m_listener->OnDeliver(id, i, m_sim.Now());
            if (--*remaining == 0 && *complete)
            {
                (*complete)();
            }
        };
        p.onDropped = [this, id, i](DropLayer layer) { m_listener->OnDrop(id, i, layer); };
        m_listener->OnEmit(id, i, m_sim.Now());
        m_net.Send(Direction::Uplink, std::move(p));
    }
    return true;
}

} // namespace uavsim
