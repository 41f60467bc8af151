#include "uavsim/lte_ran.h"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <stdexcept>

namespace uavsim {

int64_t
Tbs(int cqi, int nPrb, double overhead, int nPrbMax)
{
    if (cqi < 1 || cqi > 15)
    {
        throw std::invalid_argument(fmt::format("CQI {} outside 1..15", cqi));
    }
    if (nPrb < 1 || nPrb > nPrbMax)
    {
        throw std::invalid_argument(fmt::format("PRB count {} outside 1..{}", nPrb, nPrbMax));
    }
    const double eff = LteCqiTable().value[static_cast<size_t>(cqi - 1)];
    return static_cast<int64_t>(std::floor(eff * 12.0 * 14.0 * nPrb * (1.0 - overhead)));
}

// ---------------------------------------------------------------------------

std::vector<PrbAllocation>
RoundRobinUplink::Schedule(const std::vector<int>& activeUes, int nPrb)
{
    std::vector<PrbAllocation> out;
    if (activeUes.empty() || nPrb <= 0)
    {
        return out;
    }
    auto start = std::lower_bound(activeUes.begin(), activeUes.end(), m_next);
    if (start == activeUes.end())
    {
        start = activeUes.begin();
    }
    std::vector<int> order(start, activeUes.end());
    order.insert(order.end(), activeUes.begin(), start);

    const int k = std::min(static_cast<int>(order.size()), nPrb);
    const int base = nPrb / k;
    const int rem = nPrb % k;
    int prb = 0;
    for (int i = 0; i < k; ++i)
    {
        const int n = base + (i < rem ? 1 : 0);
        out.push_back(PrbAllocation{order[static_cast<size_t>(i)], prb, n});
        prb += n;
    }
    const bool allServed = k == static_cast<int>(order.size());
    m_next = (allServed ? order.front() : order[static_cast<size_t>(k - 1)]) + 1;
    return out;
}

// ---------------------------------------------------------------------------

ProportionalFairDownlink::ProportionalFairDownlink(double windowTti, double overhead, SimTime tti)
    : m_window(windowTti),
      m_overhead(overhead),
      m_tti(tti)
{
}

double
ProportionalFairDownlink::AverageRate(int ue) const
{
    auto it = m_avgRate.find(ue);
    return it == m_avgRate.end() ? 0.0 : it->second;
}

std::vector<DlAllocation>
ProportionalFairDownlink::Schedule(const std::vector<Demand>& demands, int nPrb)
{
    const double ttiS = m_tti.ToSeconds();
    struct Candidate
    {
        Demand d;
        double metric;
    };
    std::vector<Candidate> cands;
    for (const Demand& d : demands)
    {
        auto [it, inserted] = m_avgRate.try_emplace(d.ue, 1.0);
        const double inst = static_cast<double>(Tbs(d.cqi, 1, m_overhead, nPrb)) / 8.0 / ttiS;
        cands.push_back({d, inst / std::max(it->second, 1e-9)});
    }
    std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
        if (a.metric != b.metric)
        {
            return a.metric > b.metric;
        }
        return a.d.ue < b.d.ue;
    });

    std::vector<DlAllocation> out;
    std::map<int, double> served;
    int next = 0;
    for (const Candidate& c : cands)
    {
        if (next >= nPrb)
        {
            break;
        }
        DlAllocation alloc;
        alloc.ue = c.d.ue;
        while (next < nPrb)
        {
            alloc.prbs.push_back(next++);
            if (Tbs(c.d.cqi, static_cast<int>(alloc.prbs.size()), m_overhead, nPrb) / 8 >= c.d.bytes)
            {
                break;
            }
        }
        served[c.d.ue] =
            static_cast<double>(Tbs(c.d.cqi, static_cast<int>(alloc.prbs.size()), m_overhead, nPrb)) / 8.0;
        out.push_back(std::move(alloc));
    }

    const double alpha = 1.0 / m_window;
    for (auto& [ue, avg] : m_avgRate)
    {
        const auto it = served.find(ue);
        const double rate = it == served.end() ? 0.0 : it->second / ttiS;
        avg = (1.0 - alpha) * avg + alpha * rate;
    }
    return out;
}

// ---------------------------------------------------------------------------

RlcAmEntity::RlcAmEntity(int64_t capacityBytes, int maxRetx)
    : m_capacity(capacityBytes),
      m_maxRetx(maxRetx)
{
}

RlcAmEntity::Sdu*
RlcAmEntity::Find(uint64_t id)
{
    if (id < m_headId || id >= m_headId + m_sdus.size())
    {
        return nullptr;
    }
    return &m_sdus[id - m_headId];
}

bool
RlcAmEntity::Enqueue(Packet sdu)
{
    const auto bytes = static_cast<int64_t>(sdu.bytes);
    if (BufferedBytes() + bytes > m_capacity)
    {
        if (sdu.onDropped)
        {
            sdu.onDropped(DropLayer::Queue);
        }
        return false;
    }
    m_sdus.push_back(Sdu{std::move(sdu), bytes, bytes, false});
    ++m_nextId;
    m_newBytes += bytes;
    if (bytes == 0)
    {
        DeliverInOrder();
    }
    return true;
}

std::vector<RlcPiece>
RlcAmEntity::Pull(int64_t bytes)
{
    std::vector<RlcPiece> out;
    while (bytes > 0 && !m_retx.empty())
    {
        RlcPiece& p = m_retx.front();
        const Sdu* s = Find(p.sdu);
        if (s == nullptr || s->dropped)
        {
            m_retxBytes -= p.bytes;
            m_retx.pop_front();
            continue;
        }
        const int64_t take = std::min(bytes, p.bytes);
        out.push_back(RlcPiece{p.sdu, take, p.attempts});
        p.bytes -= take;
        m_retxBytes -= take;
        bytes -= take;
        if (p.bytes == 0)
        {
            m_retx.pop_front();
        }
    }
    while (bytes > 0 && m_sendId < m_nextId)
    {
        Sdu* s = Find(m_sendId);
        if (s == nullptr || s->dropped || s->unsent == 0)
        {
            ++m_sendId;
            continue;
        }
        const int64_t take = std::min(bytes, s->unsent);
        out.push_back(RlcPiece{m_sendId, take, 0});
        s->unsent -= take;
        m_newBytes -= take;
        bytes -= take;
    }
    return out;
}

std::vector<RlcPiece>
RlcAmEntity::OnTransmission(const std::vector<RlcPiece>& pieces, bool success)
{
    std::vector<RlcPiece> retry;
    for (const RlcPiece& p : pieces)
    {
        Sdu* s = Find(p.sdu);
        if (s == nullptr || s->dropped)
        {
            continue;
        }
        if (success)
        {
            s->remaining -= p.bytes;
            continue;
        }
        RlcPiece again = p;
        ++again.attempts;
        if (again.attempts > m_maxRetx)
        {
            s->dropped = true;
            m_newBytes -= s->unsent;
            s->unsent = 0;
            ++m_dropped;
            if (s->packet.onDropped)
            {
                s->packet.onDropped(DropLayer::Rlc);
            }
            continue;
        }
        retry.push_back(again);
    }
    DeliverInOrder();
    return retry;
}

void
RlcAmEntity::Requeue(std::vector<RlcPiece> pieces)
{
    for (RlcPiece& p : pieces)
    {
        const Sdu* s = Find(p.sdu);
        if (s == nullptr || s->dropped)
        {
            continue;
        }
        m_retxBytes += p.bytes;
        m_retx.push_back(p);
    }
}

void
RlcAmEntity::DeliverInOrder()
{
    while (!m_sdus.empty())
    {
        Sdu& head = m_sdus.front();
        if (!head.dropped)
        {
            if (head.remaining > 0 || head.unsent > 0)
            {
                break;
            }
            ++m_delivered;
            if (head.packet.onDelivered)
            {
                // move out first: the callback may enqueue into this entity
                auto cb = std::move(head.packet.onDelivered);
                m_sdus.pop_front();
                ++m_headId;
                m_sendId = std::max(m_sendId, m_headId);
                cb();
                continue;
            }
        }
        m_sdus.pop_front();
        ++m_headId;
        m_sendId = std::max(m_sendId, m_headId);
    }
}

// ---------------------------------------------------------------------------

LteNetwork::LteNetwork(Simulator& sim, LteParams params, RadioLinks ulLinks, RadioLinks dlLinks, int nNodes)
    : m_sim(sim),
      m_params(params),
      m_ul(std::move(ulLinks)),
      m_dl(std::move(dlLinks)),
      m_target(sim.RegisterTarget("lte.enb")),
      m_pf(params.pfWindowTti, params.overhead, params.tti),
      m_errorRng(&sim.Stream("lte.error"))
{
    for (int i = 0; i < nNodes; ++i)
    {
        m_ues.push_back(UeContext{i,
                                  0,
                                  0,
                                  RlcAmEntity(params.rlcBufferBytes, params.maxRetx),
                                  RlcAmEntity(params.rlcBufferBytes, params.maxRetx),
                                  std::nullopt,
                                  0});
    }
    m_sim.Schedule(m_sim.Now(), m_target, [this] { Tick(); });
}

void
LteNetwork::Send(Direction dir, Packet packet)
{
    UeContext& ue = m_ues.at(static_cast<size_t>(packet.node));
    if (dir == Direction::Uplink)
    {
        if (ue.ulRlc.Enqueue(std::move(packet)))
        {
            OnUplinkData(ue);
        }
    }
    else
    {
        ue.dlRlc.Enqueue(std::move(packet));
    }
}

void
LteNetwork::OnUplinkData(UeContext& ue)
{
    if (ue.eligibleFrom)
    {
        return;  // grant already pending or active: buffer status piggybacks
    }
    const int64_t now = m_sim.Now().Us();
    const int64_t tti = m_params.tti.Us();
    if (m_params.srPeriodMs <= 0)
    {
        ue.eligibleFrom = SimTime::Micros((now / tti + 1) * tti);
        return;
    }
    const int64_t period = static_cast<int64_t>(m_params.srPeriodMs) * 1000;
    const int64_t sr = (now + period - 1) / period * period;
    ue.eligibleFrom = SimTime::Micros(sr + tti);
}

void
LteNetwork::UpdateCqi()
{
    const SimTime now = m_sim.Now();
    for (UeContext& ue : m_ues)
    {
        ue.ulCqi = std::min(m_ul.Uplink(ue.ueId, now).mcs + 1, m_params.ulMaxCqi);
        ue.dlCqi = m_dl.Downlink(ue.ueId, now).mcs + 1;
    }
}

void
LteNetwork::Tick()
{
    const int64_t tti = m_tti++;
    if (m_params.cqiPeriodMs > 0 && tti % m_params.cqiPeriodMs == 0)
    {
        UpdateCqi();
    }
    TtiReport report;
    report.tti = tti;
    TransmitUplink(tti, report);
    TransmitDownlink(report);
    if (m_ttiObserver)
    {
        m_ttiObserver(report);
    }
    m_sim.ScheduleIn(m_params.tti, m_target, [this] { Tick(); });
}

void
LteNetwork::TransmitUplink(int64_t tti, TtiReport& report)
{
    const SimTime now = m_sim.Now();
    std::vector<int> active;
    for (const UeContext& ue : m_ues)
    {
        if (ue.eligibleFrom && *ue.eligibleFrom <= now && ue.ulCqi >= 1 && ue.ulRlc.BufferedBytes() > 0)
        {
            active.push_back(ue.ueId);
        }
    }
    report.uplink = m_rr.Schedule(active, m_params.nPrb);
    const double softness = m_ul.channel->Config().perSoftnessDb;
    for (const PrbAllocation& alloc : report.uplink)
    {
        UeContext& ue = m_ues[static_cast<size_t>(alloc.ue)];
        TransportBlock tb{ue.ueId, tti, alloc.nPrb, ue.ulCqi, Tbs(ue.ulCqi, alloc.nPrb, m_params.overhead, m_params.nPrb)};
        ue.grantedPrbs += static_cast<uint64_t>(alloc.nPrb);
        std::vector<RlcPiece> pieces = ue.ulRlc.Pull(tb.sizeBits / 8);
        if (ue.ulRlc.BufferedBytes() == 0)
        {
            ue.eligibleFrom.reset();
        }
        else
        {
            report.saturatedUes.push_back(ue.ueId);
        }
        if (pieces.empty())
        {
            continue;
        }
        const LinkState ls = LinkStateForMcs(m_ul.Uplink(ue.ueId, now).sinrDb, tb.mcs - 1, *m_ul.table, softness);
        const bool success = !m_errorRng->Bernoulli(ls.per);
        const bool firstAttempt =
            std::all_of(pieces.begin(), pieces.end(), [](const RlcPiece& p) { return p.attempts == 0; });
        if (firstAttempt)
        {
            ++m_firstTbs;
            m_firstTbFailures += success ? 0 : 1;
        }
        const int idx = ue.ueId;
        m_sim.Schedule(now + m_params.tti, m_target, [this, idx, pieces = std::move(pieces), success] {
            UeContext& u = m_ues[static_cast<size_t>(idx)];
            std::vector<RlcPiece> retry = u.ulRlc.OnTransmission(pieces, success);
            if (!retry.empty())
            {
                m_sim.ScheduleIn(m_params.rlcRetxDelay, m_target, [this, idx, retry = std::move(retry)] {
                    UeContext& v = m_ues[static_cast<size_t>(idx)];
                    v.ulRlc.Requeue(retry);
                    if (v.ulRlc.BufferedBytes() > 0)
                    {
                        OnUplinkData(v);
                    }
                });
            }
        });
    }
}

void
LteNetwork::TransmitDownlink(TtiReport& report)
{
    const SimTime now = m_sim.Now();
    std::vector<ProportionalFairDownlink::Demand> demands;
    for (const UeContext& ue : m_ues)
    {
        if (ue.dlCqi >= 1 && ue.dlRlc.BufferedBytes() > 0)
        {
            demands.push_back({ue.ueId, ue.dlCqi, ue.dlRlc.BufferedBytes()});
        }
    }
    if (demands.empty())
    {
        return;
    }
    report.downlink = m_pf.Schedule(demands, m_params.nPrb);
    const double softness = m_dl.channel->Config().perSoftnessDb;
    for (const DlAllocation& alloc : report.downlink)
    {
        UeContext& ue = m_ues[static_cast<size_t>(alloc.ue)];
        const int64_t bits = Tbs(ue.dlCqi, static_cast<int>(alloc.prbs.size()), m_params.overhead, m_params.nPrb);
        std::vector<RlcPiece> pieces = ue.dlRlc.Pull(bits / 8);
        if (pieces.empty())
        {
            continue;
        }
        const LinkState ls = LinkStateForMcs(m_dl.Downlink(ue.ueId, now).sinrDb, ue.dlCqi - 1, *m_dl.table, softness);
        const bool success = !m_errorRng->Bernoulli(ls.per);
        const int idx = ue.ueId;
        m_sim.Schedule(now + m_params.tti, m_target, [this, idx, pieces = std::move(pieces), success] {
            UeContext& u = m_ues[static_cast<size_t>(idx)];
            std::vector<RlcPiece> retry = u.dlRlc.OnTransmission(pieces, success);
            if (!retry.empty())
            {
                m_sim.ScheduleIn(m_params.rlcRetxDelay, m_target, [this, idx, retry = std::move(retry)] {
                    m_ues[static_cast<size_t>(idx)].dlRlc.Requeue(retry);
                });
            }
        });
    }
}

} // namespace uavsim
