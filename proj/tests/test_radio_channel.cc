#include "uavsim/radio_channel.h"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace uavsim;

namespace {

double
HandFreeSpace(double d, double f)
{
    const double c = 299792458.0;
    return 20.0 * std::log10(4.0 * std::numbers::pi * d * f / c);
}

} // namespace

TEST_CASE("line-of-sight loss without the C term")
{
    LosParams p;
    p.wavelength = 0.125;
    p.hBs = 10;
    p.hUav = 50;
    p.cModel = CTermModel::None;
    // |20 log10(0.015625 / 12566.37)|
    const double expected = std::fabs(20.0 * std::log10(0.015625 / (8.0 * std::numbers::pi * 500.0)));
    CHECK(expected == doctest::Approx(118.11).epsilon(1e-4));
    CHECK(PathlossLos(p, 100) == doctest::Approx(118.11).epsilon(0.01 / 118.11));
}

TEST_CASE("line-of-sight loss vanishes at unit ratio")
{
    LosParams p;
    p.hBs = 1;
    p.hUav = 1;
    p.wavelength = std::sqrt(8.0 * std::numbers::pi);
    p.cModel = CTermModel::None;
    CHECK(PathlossLos(p, 10) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("C term is zero at the breakpoint")
{
    LosParams p;
    p.hUav = 50;
    const double rbp = BreakpointDistance(p);
    CHECK(rbp == doctest::Approx(4.0 * 10 * 50 / 0.125));
    CHECK(CTerm(p, rbp) == doctest::Approx(0.0));
    LosParams none = p;
    none.cModel = CTermModel::None;
    CHECK(PathlossLos(p, rbp) == doctest::Approx(PathlossLos(none, rbp)));
}

TEST_CASE("line-of-sight rejects bad geometry")
{
    LosParams p;
    CHECK_THROWS_AS(PathlossLos(p, 0), std::invalid_argument);
    p.hBs = -1;
    CHECK_THROWS_AS(PathlossLos(p, 10), std::invalid_argument);
}

TEST_CASE("free-space loss at 40 m and 2.4 GHz")
{
    NlosParams p;
    CHECK(HandFreeSpace(40, 2.4e9) == doctest::Approx(72.1).epsilon(0.1 / 72.1));
    CHECK(PathlossNlos(p, 40) == doctest::Approx(72.1).epsilon(0.1 / 72.1));
    CHECK(PathlossNlos(p, 40) == doctest::Approx(HandFreeSpace(40, 2.4e9)).epsilon(1e-4));
}

TEST_CASE("distance doubling adds 6.02 dB")
{
    NlosParams p;
    for (double d : {5.0, 40.0, 300.0})
    {
        CHECK(PathlossNlos(p, 2 * d) - PathlossNlos(p, d) == doctest::Approx(6.0206).epsilon(0.01 / 6.02));
    }
}

TEST_CASE("diffraction loss is clamped at zero")
{
    NlosParams p;
    p.diffractionCoeffDb = 60;
    p.diffractionFloorDb = -74;
    CHECK(DiffractionLoss(p, 10) == 0.0);
    CHECK(DiffractionLoss(p, 100) == doctest::Approx(46.0));
    CHECK(PathlossNlos(p, 100) == doctest::Approx(HandFreeSpace(100, 2.4e9) + 46.0).epsilon(1e-4));
}

TEST_CASE("34 dB SINR selects the top WiFi rate")
{
    PathlossBreakdown pl;
    pl.total = 80;
    const LinkState ls = ComputeLinkState(20, pl, -94, Technology::WiFi);
    CHECK(ls.sinrDb == doctest::Approx(34.0));
    CHECK(ls.connected);
    CHECK(ls.mcs == WifiMcsTable().Size() - 1);
    CHECK(ls.per == 0.0);
}

TEST_CASE("below the lowest threshold the link is down")
{
    PathlossBreakdown pl;
    pl.total = 104;
    const LinkState ls = ComputeLinkState(20, pl, -94, Technology::WiFi);
    CHECK_FALSE(ls.connected);
    CHECK(ls.mcs == -1);
    CHECK(ls.per == 1.0);
    CHECK(PacketErrorProb(ls, 100) == 1.0);
}

TEST_CASE("a threshold is an inclusive lower bound")
{
    const McsTable& t = WifiMcsTable();
    for (int m = 0; m < t.Size(); ++m)
    {
        PathlossBreakdown pl;
        pl.total = 20.0 - (-94.0) - t.thresholdDb[static_cast<size_t>(m)];
        const LinkState ls = ComputeLinkState(20, pl, -94, t);
        CHECK(ls.mcs == m);
    }
}

TEST_CASE("soft error ramp")
{
    CHECK(PerRamp(25, 20, 1) == 0.0);
    CHECK(PerRamp(15, 20, 1) == 1.0);
    CHECK(PerRamp(20, 20, 1) == doctest::Approx(0.5));
    CHECK(PerRamp(20.5, 20, 1) == doctest::Approx(0.25));
    CHECK_THROWS_AS(PacketErrorProb(LinkState{}, 0), std::invalid_argument);
}

TEST_CASE("noise floor over 20 MHz")
{
    CHECK(NoiseFloorDbm(20e6, 7) == doctest::Approx(-174 + 10 * std::log10(20e6) + 7));
    CHECK(NoiseFloorDbm(20e6, 7) == doctest::Approx(-93.99).epsilon(1e-3));
}

TEST_CASE("pathloss breakdown is additive")
{
    ChannelConfig cfg;
    cfg.wallLossDb = 5;
    const UrbanChannel ch(cfg, 5.18e9, 20e6, 11);
    const Vec3 bs{0, 0, 10};
    for (double d : {3.0, 17.0, 40.0, 120.0})
    {
        for (double h : {1.5, 10.0, 30.0, 90.0})
        {
            const PathlossBreakdown pl = ch.Pathloss(bs, Vec3{d, 0, h}, 1);
            CHECK(pl.total - (pl.basic + pl.wallLoss + pl.altitudeGain) == doctest::Approx(0.0));
            CHECK(pl.altitudeGain <= 0.0);
            CHECK(pl.altitudeGain >= cfg.altitudeGainCapDb);
        }
    }
}

TEST_CASE("altitude gain follows the height above the base station")
{
    ChannelConfig cfg;
    cfg.shadowingSigmaDb = 0;
    const UrbanChannel ch(cfg, 5.18e9, 20e6, 1);
    const Vec3 bs{0, 0, 10};
    CHECK(ch.Pathloss(bs, Vec3{20, 0, 5}, 1).altitudeGain == doctest::Approx(0.0));
    CHECK(ch.Pathloss(bs, Vec3{20, 0, 30}, 1).altitudeGain == doctest::Approx(-2.0));
    CHECK(ch.Pathloss(bs, Vec3{20, 0, 200}, 1).altitudeGain == doctest::Approx(-6.0));
}

TEST_CASE("shadowing is a fixed field per link and cell")
{
    ChannelConfig cfg;
    const UrbanChannel a(cfg, 5.18e9, 20e6, 99);
    const UrbanChannel b(cfg, 5.18e9, 20e6, 99);
    const Vec3 p{12.3, 4.5, 30};
    const double first = a.Shadowing(1, p);
    for (int i = 0; i < 50; ++i)
    {
        a.Shadowing(2, Vec3{static_cast<double>(i), 0, 30});
    }
    CHECK(a.Shadowing(1, p) == first);
    CHECK(b.Shadowing(1, p) == first);
    CHECK(a.Shadowing(1, Vec3{12.9, 4.1, 30}) == first);

    double sum = 0;
    double sq = 0;
    const int n = 20000;
    for (int i = 0; i < n; ++i)
    {
        const double s = a.Shadowing(3, Vec3{static_cast<double>(i), 0, 30});
        sum += s;
        sq += s * s;
    }
    const double mean = sum / n;
    CHECK(std::fabs(mean) < 0.1);
    CHECK(std::sqrt(sq / n - mean * mean) == doctest::Approx(3.0).epsilon(0.05));
}
