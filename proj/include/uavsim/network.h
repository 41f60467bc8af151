#pragma once

#include "uavsim/radio_channel.h"
#include "uavsim/sim_time.h"

#include <cstdint>
#include <functional>
#include <string_view>

namespace uavsim {

/// Where a packet was lost. None means delivered (or still in flight).
enum class DropLayer
{
    None,
    Mac,      ///< WiFi retry limit exceeded
    Queue,    ///< tail drop at a MAC/RLC queue or transport send buffer
    Rlc,      ///< RLC AM max retransmissions exceeded
    Channel,  ///< idealized stub channel loss
};

std::string_view ToString(DropLayer layer);

enum class Direction
{
    Uplink,    ///< node -> infrastructure
    Downlink,  ///< infrastructure -> node
};

/// Network-layer packet. Exactly one of the callbacks fires, at the time of
/// delivery or drop.
struct Packet
{
    int node{0};  ///< wireless endpoint; 0 is the UAV
    uint32_t bytes{0};
    std::function<void()> onDelivered;
    std::function<void(DropLayer)> onDropped;
};

/// Boundary shared by the WiFi, LTE and stub models.
class AccessNetwork
{
  public:
    virtual ~AccessNetwork() = default;
    virtual void Send(Direction dir, Packet packet) = 0;
};

/// Radio links between the base station (AP or eNodeB) and every node.
struct RadioLinks
{
    const UrbanChannel* channel{nullptr};
    Vec3 bsPosition;
    std::function<Vec3(int node, SimTime t)> position;
    const McsTable* table{nullptr};
    double nodeTxPowerDbm{20};
    double bsTxPowerDbm{20};

    LinkState Uplink(int node, SimTime t) const
    {
        return channel->Evaluate(nodeTxPowerDbm, bsPosition, position(node, t), LinkId(node), *table);
    }
    LinkState Downlink(int node, SimTime t) const
    {
        return channel->Evaluate(bsTxPowerDbm, bsPosition, position(node, t), LinkId(node), *table);
    }
    static uint32_t LinkId(int node) { return static_cast<uint32_t>(node) + 1; }
};

} // namespace uavsim
