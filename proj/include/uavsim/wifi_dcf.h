#pragma once

#include "uavsim/network.h"
#include "uavsim/simulator.h"

#include <deque>
#include <functional>
#include <vector>

namespace uavsim {

/// 802.11a OFDM PHY and DCF timing. Basic access only, no RTS/CTS.
struct DcfParams
{
    SimTime slot{SimTime::Micros(9)};
    SimTime sifs{SimTime::Micros(16)};
    SimTime difs{SimTime::Micros(34)};
    int cwMin{15};
    int cwMax{1023};
    int retryLimit{7};
    int queueFrames{400};
    /// MAC header + FCS + LLC/SNAP added to every network packet.
    int macOverheadBytes{36};
    int ackBytes{14};
};

/// PLCP preamble/header (20 us) plus 4 us OFDM symbols carrying
/// SERVICE (16) + payload + tail (6) bits. Throws on an invalid MCS.
SimTime TxDuration(int payloadBytes, int mcs);

/// Contention window after k consecutive failures:
/// min(CWmax, (CWmin + 1) 2^k - 1).
int ContentionWindowAfter(int failures, int cwMin, int cwMax);

enum class StationState
{
    Idle,
    Deferring,
    BackingOff,
    Transmitting,
    WaitingAck,
};

struct MacFrame
{
    Packet packet;
    int payloadBytes{0};  ///< MAC frame size on air
    int source{0};
    int destination{0};
    int mcs{0};
    SimTime enqueueTime;
};

struct DcfStation
{
    int id{0};
    int contentionWindow{15};
    int backoffCounter{0};
    int retryCount{0};
    std::deque<MacFrame> txQueue;
    StationState state{StationState::Idle};
    /// Start of the idle period this station is counting DIFS + slots from.
    SimTime countFrom;
    SimTime headSince;
};

/// One on-air transmission as seen by the medium.
struct TxRecord
{
    int station{0};
    SimTime start;
    SimTime end;
    int mcs{0};
    int backoffDrawn{0};
    bool collided{false};
    bool success{false};
};

struct DcfStationStats
{
    uint64_t successes{0};
    uint64_t failures{0};
    uint64_t macDrops{0};
    uint64_t queueDrops{0};
    double accessDelaySumS{0};
};

/**
 * Single collision domain of stations and one AP. Station i < nNodes is the
 * node with the same index; the AP is station nNodes and carries all
 * downlink traffic. Any temporal overlap of two frames is a collision.
 *
 * After every busy period (success or collision) the medium is reserved for
 * SIFS + ACK, which mirrors EIFS deferral after a collision.
 */
class WifiNetwork : public AccessNetwork
{
  public:
    WifiNetwork(Simulator& sim, DcfParams params, RadioLinks links, int nNodes);

    void Send(Direction dir, Packet packet) override;

    void SetTxObserver(std::function<void(const TxRecord&)> obs) { m_txObserver = std::move(obs); }

    const DcfStation& Station(int idx) const { return m_stations.at(static_cast<size_t>(idx)); }
    const DcfStationStats& Stats(int idx) const { return m_stats.at(static_cast<size_t>(idx)); }
    int ApIndex() const { return m_nNodes; }
    SimTime AckDuration() const { return TxDuration(m_params.ackBytes, 0); }

  private:
    void Enqueue(int stationIdx, MacFrame frame);
    void StartContention(DcfStation& st);
    void ScheduleResolve();
    void Resolve();
    void EndBusy();
    SimTime ReadyTime(const DcfStation& st) const;
    LinkState LinkFor(const MacFrame& frame) const;
    int DrawBackoff(DcfStation& st);

    Simulator& m_sim;
    DcfParams m_params;
    RadioLinks m_links;
    int m_nNodes;
    TargetId m_target;
    std::vector<DcfStation> m_stations;
    std::vector<DcfStationStats> m_stats;
    std::vector<RngStream*> m_backoffRng;
    RngStream* m_errorRng;

    bool m_busy{false};
    SimTime m_idleSince;
    EventHandle m_resolveEvent;
    std::vector<TxRecord> m_active;
    std::vector<int> m_lastDraw;
    std::function<void(const TxRecord&)> m_txObserver;
};

} // namespace uavsim
