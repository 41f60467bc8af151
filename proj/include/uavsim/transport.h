#pragma once

#include "uavsim/network.h"
#include "uavsim/simulator.h"

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>

namespace uavsim {

struct TcpParams
{
    uint32_t mss{1460};
    uint32_t initialCwndSegments{2};
    uint64_t initialSsthresh{65536};
    SimTime initialRto{SimTime::Seconds(1)};
    SimTime minRto{SimTime::Millis(200)};
    SimTime maxRto{SimTime::Seconds(60)};
    uint64_t sendBufferBytes{262144};
    uint32_t headerBytes{40};  ///< IP + TCP
    uint32_t ackBytes{40};
};

/// ceil(bytes / payloadPerPacket); 0 for an empty burst.
uint64_t SegmentCount(uint64_t bytes, uint64_t payloadPerPacket);

enum class CongestionState
{
    SlowStart,
    CongestionAvoidance,
    FastRecovery,
};

/**
 * New Reno congestion control and RTO estimation over a byte sequence space.
 * Pure state machine: the caller performs the (re)transmissions it asks for.
 */
class NewRenoSender
{
  public:
    struct AckResult
    {
        bool newAck{false};
        bool enteredFastRecovery{false};
        bool partialAck{false};
        bool fullAck{false};
        std::optional<uint64_t> retransmit;  ///< sequence number to resend
    };

    explicit NewRenoSender(TcpParams params);

    AckResult OnAck(uint64_t ack);
    /// Timer expiry: collapses the window, backs off the RTO and rewinds
    /// sndNxt to sndUna. Returns the sequence to retransmit.
    uint64_t OnRto();
    void OnRttSample(SimTime rtt);
    void OnTransmit(uint64_t endSeq);

    uint64_t Cwnd() const { return m_cwnd; }
    uint64_t Ssthresh() const { return m_ssthresh; }
    uint64_t SndUna() const { return m_sndUna; }
    uint64_t SndNxt() const { return m_sndNxt; }
    uint64_t FlightSize() const { return m_sndNxt - m_sndUna; }
    CongestionState State() const;
    SimTime Rto() const { return m_rto; }
    std::optional<SimTime> Srtt() const { return m_srtt; }
    uint32_t Mss() const { return m_params.mss; }

    /// Test hook: start from an arbitrary window.
    void SetWindow(uint64_t cwnd, uint64_t ssthresh);

  private:
    TcpParams m_params;
    uint64_t m_cwnd;
    uint64_t m_ssthresh;
    uint64_t m_sndUna{0};
    uint64_t m_sndNxt{0};
    uint64_t m_recover{0};
    int m_dupAcks{0};
    bool m_inFastRecovery{false};
    SimTime m_rto;
    std::optional<SimTime> m_srtt;
    SimTime m_rttvar;
};

/// Per-packet bookkeeping hooks used to build the burst ledger.
class PacketListener
{
  public:
    virtual ~PacketListener() = default;
    virtual void OnEmit(uint64_t burst, uint32_t packet, SimTime t) = 0;
    virtual void OnDeliver(uint64_t burst, uint32_t packet, SimTime t) = 0;
    virtual void OnDrop(uint64_t burst, uint32_t packet, DropLayer layer) = 0;
};

struct BurstRequest
{
    uint64_t id{0};
    uint64_t bytes{0};
    /// Fires once every packet of the burst has reached the receiving
    /// application.
    std::function<void()> onComplete;
};

class Transport
{
  public:
    virtual ~Transport() = default;
    /// False when the burst was rejected at the source (every packet is
    /// reported as a queue drop).
    virtual bool SendBurst(BurstRequest burst) = 0;
    virtual uint64_t PacketsFor(uint64_t bytes) const = 0;
};

/**
 * Reliable byte stream from one node to the server. Bursts are segmented
 * independently, so packet n of a burst is always the same segment;
 * retransmissions reuse it. Delivery time is the in-order arrival at the
 * receiving application. Every ACK echoes a segment send time, so each new
 * ACK gives an RTT sample, retransmissions included.
 */
class ReliableConnection : public Transport
{
  public:
    ReliableConnection(Simulator& sim, AccessNetwork& net, int node, TcpParams params, PacketListener* listener);

    bool SendBurst(BurstRequest burst) override;
    uint64_t PacketsFor(uint64_t bytes) const override { return SegmentCount(bytes, m_params.mss); }

    const NewRenoSender& Sender() const { return m_sender; }
    uint64_t Retransmissions() const { return m_retransmissions; }
    uint64_t Timeouts() const { return m_timeouts; }

  private:
    struct Segment
    {
        uint64_t start{0};
        uint64_t end{0};
        uint64_t burst{0};
        uint32_t index{0};
        bool last{false};
        bool emitted{false};
        SimTime sentAt;
    };

    Segment* FindSegment(uint64_t seq);
    void TrySend();
    void Transmit(Segment& seg, bool retransmission);
    void OnSegmentArrival(const Segment& seg);
    void SendAck();
    void OnAckArrival(uint64_t ack, SimTime echo);
    void RestartTimer();
    void OnTimer();

    Simulator& m_sim;
    AccessNetwork& m_net;
    int m_node;
    TcpParams m_params;
    PacketListener* m_listener;
    TargetId m_target;
    NewRenoSender m_sender;

    std::deque<Segment> m_segments;  // unacked + unsent, ordered by start
    uint64_t m_appendEnd{0};
    std::map<uint64_t, std::function<void()>> m_completions;  // by burst id
    EventHandle m_timer;
    uint64_t m_retransmissions{0};
    uint64_t m_timeouts{0};

    // receiver side
    uint64_t m_rcvNxt{0};
    uint64_t m_lastAckSent{0};
    SimTime m_tsRecent;
    std::map<uint64_t, Segment> m_outOfOrder;
};

/// Fire-and-forget datagrams; a lost packet is never recovered.
class DatagramSocket : public Transport
{
  public:
    DatagramSocket(Simulator& sim, AccessNetwork& net, int node, uint32_t payloadPerPacket, uint32_t headerBytes, PacketListener* listener);

    bool SendBurst(BurstRequest burst) override;
    uint64_t PacketsFor(uint64_t bytes) const override { return SegmentCount(bytes, m_payload); }

  private:
    Simulator& m_sim;
    AccessNetwork& m_net;
    int m_node;
    uint32_t m_payload;
    uint32_t m_header;
    PacketListener* m_listener;
    TargetId m_target;
};

} // namespace uavsim
