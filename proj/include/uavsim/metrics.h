#pragma once

#include "uavsim/apps.h"
#include "uavsim/network.h"
#include "uavsim/transport.h"

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace uavsim {

/// Raised when per-packet accounting becomes inconsistent (a model bug).
class AccountingError : public std::logic_error
{
  public:
    using std::logic_error::logic_error;
};

/// Per-burst record of the network transformation: emission time, per-packet
/// delivery times (nullopt = never delivered), delivery flags and burst delay.
struct PhiRecord
{
    uint64_t burstId{0};
    BurstKind kind{BurstKind::Telemetry};
    SimTime tau;
    uint64_t sizeBytes{0};
    std::vector<std::optional<SimTime>> t;
    std::vector<uint8_t> omega;
    std::optional<SimTime> delta;  ///< nullopt when any packet was lost

    // per-packet trace detail
    std::vector<std::optional<SimTime>> emit;
    std::vector<std::string> layer;  ///< drop layer, "inflight" or empty
};

/// Builds omega and delta from per-packet delivery times.
PhiRecord MakePhiRecord(uint64_t burstId,
                        BurstKind kind,
                        SimTime tau,
                        uint64_t sizeBytes,
                        std::vector<std::optional<SimTime>> deliveries);

/// Throws AccountingError if lengths, the omega/t correspondence or the max
/// rule are violated.
void CheckPhiRecord(const PhiRecord& r);

struct PacketCounts
{
    uint64_t emitted{0};
    uint64_t delivered{0};
    uint64_t inFlight{0};
    std::array<uint64_t, 5> dropped{};  ///< indexed by DropLayer

    uint64_t Dropped(DropLayer l) const { return dropped[static_cast<size_t>(l)]; }
    uint64_t TotalDropped() const;
    /// emitted == delivered + drops + in-flight.
    bool Conserved() const { return emitted == delivered + TotalDropped() + inFlight; }
};

/**
 * Collects packet events for the tracked UAV bursts. Each packet may reach
 * exactly one terminal state (delivered or dropped); anything else is an
 * AccountingError.
 */
class PhiCollector : public PacketListener
{
  public:
    /// Registers a burst and returns its run-unique id.
    uint64_t Register(const Burst& burst, uint64_t nPackets);

    void OnEmit(uint64_t burst, uint32_t packet, SimTime t) override;
    void OnDeliver(uint64_t burst, uint32_t packet, SimTime t) override;
    void OnDrop(uint64_t burst, uint32_t packet, DropLayer layer) override;

    /// Closes the horizon: undelivered, undropped packets count as lost.
    std::vector<PhiRecord> Finalize() const;
    PacketCounts Counts() const;

  private:
    struct PacketState
    {
        std::optional<SimTime> emit;
        std::optional<SimTime> deliver;
        DropLayer drop{DropLayer::None};
    };
    struct Entry
    {
        Burst burst;
        std::vector<PacketState> packets;
    };

    PacketState& At(uint64_t burst, uint32_t packet);

    std::vector<Entry> m_entries;  // index == burst id
};

/// Aggregate counters for untracked (exogenous) packets.
class PacketTally
{
  public:
    void Emitted() { ++m_counts.emitted; ++m_open; }
    void Delivered();
    void Dropped(DropLayer layer);
    PacketCounts Counts() const;

  private:
    PacketCounts m_counts;
    uint64_t m_open{0};
};

struct ErrorSample
{
    SimTime t;
    Vec3 truth;
    Vec3 estimate;
    double error{0};
};

struct Stats
{
    uint64_t n{0};
    double mean{0};
    double variance{0};  ///< population variance
    double p95{0};
};

/// Mean, population variance and nearest-rank 95th percentile; zeros if empty.
Stats ComputeStats(std::vector<double> values);

struct RunSummary
{
    uint64_t seed{0};
    Stats positionErrorM;
    Stats taskDelayMs;
    Stats telemetryDelayMs;
    double incompleteTaskFraction{0};
    uint64_t taskBursts{0};
    double deliveryRatio{0};
    double telemetryDeliveryRatio{0};
    PacketCounts uavPackets;
    PacketCounts exogenousPackets;
};

RunSummary Summarize(const std::vector<PhiRecord>& records,
                     const std::vector<ErrorSample>& errors,
                     const PacketCounts& uav,
                     const PacketCounts& exogenous,
                     uint64_t seed);

} // namespace uavsim
