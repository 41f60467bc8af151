#include "uavsim/network.h"
#include "uavsim/stub_network.h"

#include <algorithm>
#include <stdexcept>

namespace uavsim {

std::string_view
ToString(DropLayer layer)
{
    switch (layer)
    {
    case DropLayer::None:
        return "";
    case DropLayer::Mac:
        return "mac";
    case DropLayer::Queue:
        return "queue";
    case DropLayer::Rlc:
        return "rlc";
    case DropLayer::Channel:
        return "channel";
    }
    return "";
}

StubNetwork::StubNetwork(Simulator& sim, StubParams params)
    : m_sim(sim),
      m_params(params),
      m_target(sim.RegisterTarget("stub")),
      m_rng(&sim.Stream("stub"))
{
    if (params.delay < SimTime::Zero() || params.jitter < SimTime::Zero())
    {
        throw std::invalid_argument("stub delay and jitter must be non-negative");
    }
    if (!(params.lossProb >= 0.0 && params.lossProb <= 1.0))
    {
        throw std::invalid_argument("stub loss probability must be in [0, 1]");
    }
}

void
StubNetwork::Send(Direction /*dir*/, Packet packet)
{
    if (m_params.lossProb > 0 && m_rng->Bernoulli(m_params.lossProb))
    {
        if (packet.onDropped)
        {
            packet.onDropped(DropLayer::Channel);
        }
        return;
    }
    SimTime delay = m_params.delay;
    if (m_params.jitter > SimTime::Zero())
    {
        const int64_t j = m_params.jitter.Us();
        const int64_t offset = static_cast<int64_t>(m_rng->UniformInt(static_cast<uint64_t>(2 * j))) - j;
        delay = SimTime::Micros(std::max<int64_t>(0, delay.Us() + offset));
    }
    if (packet.onDelivered)
    {
        m_sim.ScheduleIn(delay, m_target, std::move(packet.onDelivered));
    }
}

} // namespace uavsim
