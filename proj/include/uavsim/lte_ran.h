#pragma once

#include "uavsim/network.h"
#include "uavsim/simulator.h"

#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <vector>

namespace uavsim {

struct LteParams
{
    int nPrb{100};
    double overhead{0.25};
    SimTime tti{SimTime::Millis(1)};
    int srPeriodMs{5};
    int maxRetx{4};
    SimTime rlcRetxDelay{SimTime::Millis(8)};
    int64_t rlcBufferBytes{1'000'000};
    int cqiPeriodMs{10};
    double pfWindowTti{100};
    /// Highest uplink CQI the UE may use (modulation ceiling of its category).
    int ulMaxCqi{15};
};

/**
 * Transport block size in bits:
 * floor(efficiency(cqi) * 12 subcarriers * 14 symbols * nPrb * (1 - overhead)).
 * Throws std::invalid_argument outside 1 <= cqi <= 15, 1 <= nPrb <= nPrbMax.
 */
int64_t Tbs(int cqi, int nPrb, double overhead = 0.25, int nPrbMax = 100);

/// Contiguous uplink PRB range [firstPrb, firstPrb + nPrb).
struct PrbAllocation
{
    int ue{0};
    int firstPrb{0};
    int nPrb{0};
};

/// Downlink allocation; PRBs need not be contiguous.
struct DlAllocation
{
    int ue{0};
    std::vector<int> prbs;
};

struct TransportBlock
{
    int ue{0};
    int64_t tti{0};
    int nPrbAlloc{0};
    int mcs{0};  ///< CQI used for the block
    int64_t sizeBits{0};
};

/**
 * Round-robin uplink: the PRBs are split into contiguous, equal blocks over
 * the active UEs. The starting UE rotates every call, and the remainder PRBs
 * go to the first UEs in that rotation order.
 */
class RoundRobinUplink
{
  public:
    /// `activeUes` must be sorted ascending and unique.
    std::vector<PrbAllocation> Schedule(const std::vector<int>& activeUes, int nPrb);

  private:
    int m_next{0};
};

/// Proportional-fair downlink over a frequency-flat channel.
class ProportionalFairDownlink
{
  public:
    struct Demand
    {
        int ue{0};
        int cqi{1};
        int64_t bytes{0};
    };

    ProportionalFairDownlink(double windowTti, double overhead, SimTime tti);
    std::vector<DlAllocation> Schedule(const std::vector<Demand>& demands, int nPrb);
    double AverageRate(int ue) const;

  private:
    double m_window;
    double m_overhead;
    SimTime m_tti;
    std::map<int, double> m_avgRate;  // bytes/s
};

/// Slice of an RLC SDU carried by a transport block.
struct RlcPiece
{
    uint64_t sdu{0};
    int64_t bytes{0};
    int attempts{0};
};

/**
 * RLC acknowledged mode for one bearer: segmentation into transport blocks,
 * ARQ retransmission of failed pieces and strictly in-order SDU delivery.
 * SDUs whose pieces fail more than maxRetx + 1 times are dropped.
 */
class RlcAmEntity
{
  public:
    RlcAmEntity(int64_t capacityBytes, int maxRetx);

    /// Returns false (and reports a queue drop) when the buffer is full.
    bool Enqueue(Packet sdu);
    /// Bytes ready to send: pending retransmissions plus new data.
    int64_t BufferedBytes() const { return m_retxBytes + m_newBytes; }
    /// Takes up to `bytes` bytes, retransmissions first.
    std::vector<RlcPiece> Pull(int64_t bytes);
    /// Successful pieces are reassembled; returns the failed pieces that
    /// should be retransmitted (already dropped ones are filtered out).
    std::vector<RlcPiece> OnTransmission(const std::vector<RlcPiece>& pieces, bool success);
    void Requeue(std::vector<RlcPiece> pieces);

    uint64_t DeliveredSdus() const { return m_delivered; }
    uint64_t DroppedSdus() const { return m_dropped; }

  private:
    struct Sdu
    {
        Packet packet;
        int64_t remaining{0};  // bytes not yet received
        int64_t unsent{0};     // bytes of new data not yet pulled
        bool dropped{false};
    };

    void DeliverInOrder();
    Sdu* Find(uint64_t id);

    int64_t m_capacity;
    int m_maxRetx;
    uint64_t m_nextId{0};
    uint64_t m_headId{0};   // oldest SDU not yet delivered or dropped
    uint64_t m_sendId{0};   // oldest SDU with unsent new data
    std::deque<Sdu> m_sdus; // m_sdus[0] has id m_headId
    std::deque<RlcPiece> m_retx;
    int64_t m_retxBytes{0};
    int64_t m_newBytes{0};
    uint64_t m_delivered{0};
    uint64_t m_dropped{0};
};

struct UeContext
{
    int ueId{0};
    int ulCqi{0};  ///< 0 = out of range
    int dlCqi{0};
    RlcAmEntity ulRlc;
    RlcAmEntity dlRlc;
    std::optional<SimTime> eligibleFrom;  ///< set once an uplink grant is issued
    uint64_t grantedPrbs{0};
};

struct TtiReport
{
    int64_t tti{0};
    std::vector<PrbAllocation> uplink;
    std::vector<DlAllocation> downlink;
    std::vector<int> saturatedUes;  ///< UEs still backlogged after the TTI
};

/**
 * Single-cell LTE RAN. Uplink data arriving at an idle UE waits for the next
 * scheduling-request opportunity, is granted one TTI later, and the UE stays
 * schedulable (buffer status piggybacked) until its buffer drains.
 */
class LteNetwork : public AccessNetwork
{
  public:
    LteNetwork(Simulator& sim, LteParams params, RadioLinks ulLinks, RadioLinks dlLinks, int nNodes);

    void Send(Direction dir, Packet packet) override;

    void SetTtiObserver(std::function<void(const TtiReport&)> obs) { m_ttiObserver = std::move(obs); }
    const UeContext& Ue(int idx) const { return m_ues.at(static_cast<size_t>(idx)); }
    /// First-attempt uplink transport-block outcomes.
    uint64_t FirstAttemptTbs() const { return m_firstTbs; }
    uint64_t FirstAttemptFailures() const { return m_firstTbFailures; }

  private:
    void Tick();
    void UpdateCqi();
    void OnUplinkData(UeContext& ue);
    void TransmitUplink(int64_t tti, TtiReport& report);
    void TransmitDownlink(TtiReport& report);

    Simulator& m_sim;
    LteParams m_params;
    RadioLinks m_ul;
    RadioLinks m_dl;
    TargetId m_target;
    std::vector<UeContext> m_ues;
    RoundRobinUplink m_rr;
    ProportionalFairDownlink m_pf;
    RngStream* m_errorRng;
    int64_t m_tti{0};
    uint64_t m_firstTbs{0};
    uint64_t m_firstTbFailures{0};
    std::function<void(const TtiReport&)> m_ttiObserver;
};

} // namespace uavsim
