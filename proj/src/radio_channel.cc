#include "uavsim/radio_channel.h"

#include "uavsim/rng.h"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace uavsim {

namespace {

constexpr double kSpeedOfLight = 299792458.0;

void
RequirePositive(double v, const char* what)
{
    if (!(v > 0))
    {
        throw std::invalid_argument(std::string(what) + " must be positive");
    }
}

} // namespace

double
BreakpointDistance(const LosParams& p)
{
    return 4.0 * p.hBs * p.hUav / p.wavelength;
}

double
CTerm(const LosParams& p, double d)
{
    switch (p.cModel)
    {
    case CTermModel::None:
        return p.cOffsetDb;
    case CTermModel::BreakpointLowerBound: {
        const double rbp = BreakpointDistance(p);
        const double slope = d <= rbp ? 20.0 : 40.0;
        return slope * std::log10(d / rbp) + p.cOffsetDb;
    }
    }
    return p.cOffsetDb;
}

double
PathlossLos(const LosParams& p, double d)
{
    RequirePositive(d, "distance");
    RequirePositive(p.wavelength, "wavelength");
    RequirePositive(p.hBs, "base-station height");
    RequirePositive(p.hUav, "UAV height");
    const double ratio = p.wavelength * p.wavelength / (8.0 * std::numbers::pi * p.hBs * p.hUav);
    return std::fabs(20.0 * std::log10(ratio)) + CTerm(p, d);
}

double
FreeSpaceLoss(double d, double frequencyHz)
{
    RequirePositive(d, "distance");
    RequirePositive(frequencyHz, "frequency");
    return 20.0 * std::log10(d) + 20.0 * std::log10(frequencyHz) - 147.55;
}

double
DiffractionLoss(const NlosParams& p, double d)
{
    const double ldf = p.diffractionFloorDb + p.diffractionCoeffDb * std::log10(std::max(d, 1.0));
    return std::max(0.0, ldf);
}

double
PathlossNlos(const NlosParams& p, double d)
{
    return FreeSpaceLoss(d, p.frequencyHz) + DiffractionLoss(p, d);
}

const McsTable&
WifiMcsTable()
{
    // 6, 9, 12, 18, 24, 36, 48, 54 Mbps
    static const McsTable table{
        {12, 13, 15, 17, 20, 24, 28, 29},
        {24, 36, 48, 72, 96, 144, 192, 216},
    };
    return table;
}

const McsTable&
LteCqiTable()
{
    static const McsTable table{
        {-6.7, -4.7, -2.3, 0.2, 2.4, 4.3, 5.9, 8.1, 10.3, 11.7, 14.1, 16.3, 18.7, 21.0, 22.7},
        {0.1523, 0.2344, 0.3770, 0.6016, 0.8770, 1.1758, 1.4766, 1.9141, 2.4063, 2.7305, 3.3223,
         3.9023, 4.5234, 5.1152, 5.5547},
    };
    return table;
}

const McsTable&
DefaultTable(Technology tech)
{
    return tech == Technology::WiFi ? WifiMcsTable() : LteCqiTable();
}

double
PerRamp(double sinrDb, double thresholdDb, double softnessDb)
{
    if (softnessDb <= 0)
    {
        return sinrDb >= thresholdDb ? 0.0 : 1.0;
    }
    const double x = (thresholdDb + softnessDb - sinrDb) / (2.0 * softnessDb);
    return std::clamp(x, 0.0, 1.0);
}

LinkState
LinkStateForMcs(double sinrDb, int mcs, const McsTable& table, double softnessDb)
{
    LinkState ls;
    ls.sinrDb = sinrDb;
    ls.connected = !table.thresholdDb.empty() && sinrDb >= table.thresholdDb.front();
    if (!ls.connected || mcs < 0 || mcs >= table.Size())
    {
        ls.connected = false;
        ls.mcs = -1;
        ls.per = 1.0;
        return ls;
    }
    ls.mcs = mcs;
    ls.thresholdDb = table.thresholdDb[static_cast<size_t>(mcs)];
    ls.per = PerRamp(sinrDb, ls.thresholdDb, softnessDb);
    return ls;
}

LinkState
ComputeLinkState(double txPowerDbm,
                 const PathlossBreakdown& pl,
                 double noiseFloorDbm,
                 const McsTable& table,
                 double softnessDb)
{
    const double sinr = txPowerDbm - pl.total - noiseFloorDbm;
    const auto it = std::upper_bound(table.thresholdDb.begin(), table.thresholdDb.end(), sinr);
    const int mcs = static_cast<int>(it - table.thresholdDb.begin()) - 1;
    return LinkStateForMcs(sinr, mcs, table, softnessDb);
}

LinkState
ComputeLinkState(double txPowerDbm,
                 const PathlossBreakdown& pl,
                 double noiseFloorDbm,
                 Technology tech)
{
    return ComputeLinkState(txPowerDbm, pl, noiseFloorDbm, DefaultTable(tech));
}

double
PacketErrorProb(const LinkState& ls, int payloadBytes, double softnessDb)
{
    if (payloadBytes <= 0)
    {
        throw std::invalid_argument("payload must be positive");
    }
    if (!ls.connected)
    {
        return 1.0;
    }
    return PerRamp(ls.sinrDb, ls.thresholdDb, softnessDb);
}

double
NoiseFloorDbm(double bandwidthHz, double noiseFigureDb)
{
    return -174.0 + 10.0 * std::log10(bandwidthHz) + noiseFigureDb;
}

UrbanChannel::UrbanChannel(ChannelConfig cfg,
                           double frequencyHz,
                           double bandwidthHz,
                           uint64_t shadowSeed)
    : m_cfg(cfg),
      m_frequencyHz(frequencyHz),
      m_noiseFloorDbm(NoiseFloorDbm(bandwidthHz, cfg.noiseFigureDb)),
      m_shadowSeed(shadowSeed)
{
}

double
UrbanChannel::Shadowing(uint32_t linkId, const Vec3& node) const
{
    if (m_cfg.shadowingSigmaDb <= 0)
    {
        return 0.0;
    }
    const auto cell = [](double v) { return static_cast<uint64_t>(static_cast<int64_t>(std::floor(v))); };
    uint64_t h = Mix64(m_shadowSeed ^ Mix64(linkId));
    h = Mix64(h ^ cell(node.x));
    h = Mix64(h ^ cell(node.y));
    h = Mix64(h ^ cell(node.z));
    const uint64_t h2 = Mix64(h);
    const double u1 = 1.0 - static_cast<double>(h >> 11) * 0x1.0p-53;
    const double u2 = static_cast<double>(h2 >> 11) * 0x1.0p-53;
    const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    return m_cfg.shadowingSigmaDb * z;
}

PathlossBreakdown
UrbanChannel::Pathloss(const Vec3& bs, const Vec3& node, uint32_t linkId) const
{
    // Co-located points would make the log terms blow up.
    const double d = std::max(Distance(bs, node), 0.1);
    PathlossBreakdown pl;
    pl.regime = m_cfg.regime;
    double basic;
    if (m_cfg.regime == Regime::Los)
    {
        LosParams p;
        p.wavelength = kSpeedOfLight / m_frequencyHz;
        p.hBs = bs.z;
        p.hUav = node.z;
        p.cModel = m_cfg.cModel;
        p.cOffsetDb = m_cfg.cOffsetDb;
        basic = PathlossLos(p, d);
    }
    else
    {
        basic = PathlossNlos(NlosParams{m_frequencyHz, m_cfg.diffractionCoeffDb, m_cfg.diffractionFloorDb}, d);
    }
    pl.basic = std::max(0.0, basic + Shadowing(linkId, node));
    pl.wallLoss = m_cfg.wallLossDb;
    const double above = std::max(0.0, node.z - bs.z);
    pl.altitudeGain = std::max(m_cfg.altitudeGainCapDb, m_cfg.altitudeGainDbPerM * above);
    pl.total = pl.basic + pl.wallLoss + pl.altitudeGain;
    return pl;
}

LinkState
UrbanChannel::Evaluate(double txPowerDbm,
                       const Vec3& bs,
                       const Vec3& node,
                       uint32_t linkId,
                       const McsTable& table) const
{
    return ComputeLinkState(txPowerDbm, Pathloss(bs, node, linkId), m_noiseFloorDbm, table, m_cfg.perSoftnessDb);
}

} // namespace uavsim
