#pragma once

#include "uavsim/mobility.h"

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace uavsim {

enum class Technology
{
    WiFi,
    Lte,
};

enum class Regime
{
    Los,
    Nlos,
};

/// Total loss and its additive decomposition: total = basic + wallLoss + altitudeGain.
struct PathlossBreakdown
{
    double total{0};
    double basic{0};
    double wallLoss{0};
    double altitudeGain{0};
    Regime regime{Regime::Nlos};
};

enum class CTermModel
{
    None,                  ///< C = offset only
    BreakpointLowerBound,  ///< 20/40 log10(d / R_bp) around the two-ray breakpoint
};

struct LosParams
{
    double wavelength{0.125};
    double hBs{10};
    double hUav{30};
    CTermModel cModel{CTermModel::BreakpointLowerBound};
    double cOffsetDb{0};
};

struct NlosParams
{
    double frequencyHz{2.4e9};
    double diffractionCoeffDb{0};  ///< dB per decade of distance
    double diffractionFloorDb{0};
};

/// Two-ray breakpoint distance 4 h_bs h_uav / lambda.
double BreakpointDistance(const LosParams& p);
/// Distance-dependent C term of the line-of-sight loss, including the offset.
double CTerm(const LosParams& p, double d);
/// |20 log10(lambda^2 / (8 pi h_bs h_uav))| + C(d). Throws std::invalid_argument
/// on non-positive geometry.
double PathlossLos(const LosParams& p, double d);

double FreeSpaceLoss(double d, double frequencyHz);
/// floor + coeff * log10(max(d, 1 m)), clamped at 0 dB.
double DiffractionLoss(const NlosParams& p, double d);
/// Free-space loss plus diffraction loss.
double PathlossNlos(const NlosParams& p, double d);

/// Per-technology table of SINR thresholds (ascending), one entry per MCS.
struct McsTable
{
    std::vector<double> thresholdDb;
    /// WiFi: data bits per OFDM symbol. LTE: spectral efficiency (bits/RE).
    std::vector<double> value;

    int Size() const { return static_cast<int>(thresholdDb.size()); }
};

/// 802.11a rates 6..54 Mbps, thresholds from receiver sensitivity over a
/// -94 dBm noise floor.
const McsTable& WifiMcsTable();
/// LTE CQI 1..15 (index 0 = CQI 1).
const McsTable& LteCqiTable();
const McsTable& DefaultTable(Technology tech);

struct LinkState
{
    double sinrDb{0};
    int mcs{-1};  ///< -1 when disconnected
    double thresholdDb{0};
    double per{1.0};
    bool connected{false};
};

/**
 * Interference-free SINR and threshold rate selection: the highest MCS whose
 * threshold is <= sinr (inclusive). Below the lowest threshold the link is
 * disconnected and per = 1.
 */
LinkState ComputeLinkState(double txPowerDbm,
                           const PathlossBreakdown& pl,
                           double noiseFloorDbm,
                           const McsTable& table,
                           double softnessDb = 1.0);
LinkState ComputeLinkState(double txPowerDbm,
                           const PathlossBreakdown& pl,
                           double noiseFloorDbm,
                           Technology tech);

/// Link evaluated at `sinrDb` while transmitting with a fixed `mcs`
/// (e.g. a stale CQI).
LinkState LinkStateForMcs(double sinrDb, int mcs, const McsTable& table, double softnessDb = 1.0);

/// Soft threshold: 1 below thr - w, 0 above thr + w, linear in between.
double PerRamp(double sinrDb, double thresholdDb, double softnessDb);
/// Frame error probability for the link. Throws on payloadBytes <= 0.
double PacketErrorProb(const LinkState& ls, int payloadBytes, double softnessDb = 1.0);

/// Thermal noise over the bandwidth plus receiver noise figure.
double NoiseFloorDbm(double bandwidthHz, double noiseFigureDb);

struct ChannelConfig
{
    Regime regime{Regime::Nlos};
    CTermModel cModel{CTermModel::BreakpointLowerBound};
    double cOffsetDb{0};
    double diffractionCoeffDb{60};
    double diffractionFloorDb{-74};
    double wallLossDb{0};
    double altitudeGainDbPerM{-0.1};
    double altitudeGainCapDb{-6};
    double shadowingSigmaDb{3};
    double noiseFigureDb{7};
    double perSoftnessDb{1};
};

/**
 * Urban channel between a base station and a node. Shadowing is a
 * log-normal value fixed per (link, 1 m position cell) and folded into the
 * basic loss; it is a pure function of the stream seed, so lookups in any
 * order give the same field.
 */
class UrbanChannel
{
  public:
    UrbanChannel(ChannelConfig cfg, double frequencyHz, double bandwidthHz, uint64_t shadowSeed);

    PathlossBreakdown Pathloss(const Vec3& bs, const Vec3& node, uint32_t linkId) const;
    LinkState Evaluate(double txPowerDbm,
                       const Vec3& bs,
                       const Vec3& node,
                       uint32_t linkId,
                       const McsTable& table) const;
    double Shadowing(uint32_t linkId, const Vec3& node) const;

    double NoiseFloor() const { return m_noiseFloorDbm; }
    const ChannelConfig& Config() const { return m_cfg; }

  private:
    ChannelConfig m_cfg;
    double m_frequencyHz;
    double m_noiseFloorDbm;
    uint64_t m_shadowSeed;
};

} // namespace uavsim
