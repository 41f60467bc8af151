#include "uavsim/simulator.h"

#include <fmt/format.h>

namespace uavsim {

Simulator::Simulator(uint64_t seed)
    : m_seed(seed)
{
}

TargetId
Simulator::RegisterTarget(const std::string& name)
{
    m_targets.push_back(name);
    return static_cast<TargetId>(m_targets.size());
}

const std::string&
Simulator::TargetName(TargetId id) const
{
    if (id == 0 || id > m_targets.size())
    {
        throw SimError(fmt::format("unknown event target {}", id));
    }
    return m_targets[id - 1];
}

EventHandle
Simulator::Schedule(SimTime at, TargetId target, std::function<void()> fn)
{
    if (at < m_now)
    {
        throw SimError(fmt::format("past event: scheduled at {} us, clock is {} us",
                                   at.Us(),
                                   m_now.Us()));
    }
    const uint64_t seq = m_nextSequence++;
    m_queue.push(Event{at, seq, target, std::move(fn)});
    return EventHandle{seq};
}

void
Simulator::Cancel(EventHandle handle)
{
    if (handle.Valid())
    {
        m_cancelled.insert(handle.sequence);
    }
}

RunStats
Simulator::RunUntil(SimTime end)
{
    RunStats stats;
    while (!m_queue.empty() && m_queue.top().fireAt <= end)
    {
        // priority_queue::top is const; the event is moved out before pop.
        Event ev = std::move(const_cast<Event&>(m_queue.top()));
        m_queue.pop();
        if (auto it = m_cancelled.find(ev.sequence); it != m_cancelled.end())
        {
            m_cancelled.erase(it);
            continue;
        }
        if (ev.target == 0 || ev.target > m_targets.size())
        {
            throw SimError(fmt::format("unhandled event target {} at {} us",
                                       ev.target,
                                       ev.fireAt.Us()));
        }
        m_now = ev.fireAt;
        if (m_trace)
        {
            m_trace(TraceEntry{ev.fireAt, ev.sequence, ev.target});
        }
        ++stats.dispatched;
        if (ev.payload)
        {
            ev.payload();
        }
    }
    if (end > m_now)
    {
        m_now = end;
    }
    stats.clock = m_now;
    return stats;
}

RngStream&
Simulator::Stream(const std::string& label)
{
    auto it = m_streams.find(label);
    if (it == m_streams.end())
    {
        it = m_streams.emplace(label, std::make_unique<RngStream>(m_seed, label)).first;
    }
    return *it->second;
}

} // namespace uavsim
