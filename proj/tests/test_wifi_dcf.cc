#include "test_util.h"
#include "uavsim/wifi_dcf.h"

#include <doctest.h>

#include <vector>

using namespace uavsim;

TEST_CASE("802.11a frame durations")
{
    CHECK(TxDuration(1500, 7).Us() == 20 + 4 * ((16 + 8 * 1500 + 6 + 215) / 216));
    CHECK(TxDuration(1500, 7).Us() == 244);
    CHECK(TxDuration(0, 0).Us() == 24);
    CHECK(TxDuration(800, 7).Us() == 140);
    CHECK_THROWS_AS(TxDuration(100, 8), std::invalid_argument);
    CHECK_THROWS_AS(TxDuration(100, -1), std::invalid_argument);
}

TEST_CASE("contention window doubling")
{
    CHECK(ContentionWindowAfter(0, 15, 1023) == 15);
    CHECK(ContentionWindowAfter(1, 15, 1023) == 31);
    CHECK(ContentionWindowAfter(2, 15, 1023) == 63);
    CHECK(ContentionWindowAfter(6, 15, 1023) == 1023);
    CHECK(ContentionWindowAfter(20, 15, 1023) == 1023);
}

TEST_CASE("idle station transmits after DIFS plus its backoff")
{
    auto ch = test::FlatChannel(5.18e9, 20e6);
    for (uint64_t seed = 1; seed <= 20; ++seed)
    {
        Simulator sim(seed);
        WifiNetwork wifi(sim, DcfParams{}, test::FixedLinks(*ch, {5, 0}, WifiMcsTable(), 20), 1);
        std::vector<TxRecord> recs;
        wifi.SetTxObserver([&](const TxRecord& r) { recs.push_back(r); });
        const TargetId t = sim.RegisterTarget("app");
        sim.Schedule(SimTime::Micros(1000), t, [&] { wifi.Send(Direction::Uplink, Packet{0, 100, {}, {}}); });
        sim.RunUntil(SimTime::Millis(10));
        REQUIRE(recs.size() == 1);
        CHECK(recs[0].start.Us() == 1000 + 34 + 9 * recs[0].backoffDrawn);
        CHECK(recs[0].backoffDrawn >= 0);
        CHECK(recs[0].backoffDrawn <= 15);
        CHECK(recs[0].success);
        CHECK(recs[0].mcs == 7);
    }
}

TEST_CASE("a collision doubles both contention windows")
{
    auto ch = test::FlatChannel(5.18e9, 20e6);
    Simulator sim(5);
    WifiNetwork wifi(sim, DcfParams{}, test::FixedLinks(*ch, {5, 5, 0}, WifiMcsTable(), 20), 2);
    const TargetId t = sim.RegisterTarget("app");
    int collisions = 0;
    int checked = 0;
    wifi.SetTxObserver([&](const TxRecord& r) {
        if (!r.collided || checked > 0)
        {
            return;
        }
        ++collisions;
        // runs after the medium is released at the same instant
        sim.Schedule(sim.Now(), t, [&, st = r.station] {
            const DcfStation& s = wifi.Station(st);
            CHECK(s.retryCount == 1);
            CHECK(s.contentionWindow == 31);
            ++checked;
        });
    });
    for (int n = 0; n < 2; ++n)
    {
        for (int i = 0; i < 200; ++i)
        {
            wifi.Send(Direction::Uplink, Packet{n, 1000, {}, {}});
        }
    }
    sim.RunUntil(SimTime::Seconds(1));
    CHECK(collisions >= 1);
    CHECK(checked == 2);
}

TEST_CASE("retry limit drops the frame after the eighth failure")
{
    auto ch = test::FlatChannel(5.18e9, 20e6);
    Simulator sim(3);
    WifiNetwork wifi(sim, DcfParams{}, test::FixedLinks(*ch, {1e5, 0}, WifiMcsTable(), 20), 1);
    int attempts = 0;
    wifi.SetTxObserver([&](const TxRecord& r) {
        ++attempts;
        CHECK_FALSE(r.success);
    });
    int delivered = 0;
    std::vector<DropLayer> drops;
    Packet p{0, 200, [&] { ++delivered; }, [&](DropLayer l) { drops.push_back(l); }};
    wifi.Send(Direction::Uplink, std::move(p));
    sim.RunUntil(SimTime::Seconds(1));
    CHECK(attempts == 8);
    CHECK(delivered == 0);
    REQUIRE(drops.size() == 1);
    CHECK(drops[0] == DropLayer::Mac);
    CHECK(wifi.Stats(0).macDrops == 1);
}

TEST_CASE("full queue tail-drops")
{
    auto ch = test::FlatChannel(5.18e9, 20e6);
    Simulator sim(3);
    DcfParams params;
    params.queueFrames = 4;
    WifiNetwork wifi(sim, params, test::FixedLinks(*ch, {5, 0}, WifiMcsTable(), 20), 1);
    int queueDrops = 0;
    int delivered = 0;
    for (int i = 0; i < 6; ++i)
    {
        wifi.Send(Direction::Uplink, Packet{0, 500, [&] { ++delivered; }, [&](DropLayer l) {
                                                CHECK(l == DropLayer::Queue);
                                                ++queueDrops;
                                            }});
    }
    sim.RunUntil(SimTime::Seconds(1));
    CHECK(queueDrops == 2);
    CHECK(delivered == 4);
}

TEST_CASE("downlink frames go through the access point")
{
    auto ch = test::FlatChannel(5.18e9, 20e6);
    Simulator sim(3);
    WifiNetwork wifi(sim, DcfParams{}, test::FixedLinks(*ch, {5, 0}, WifiMcsTable(), 20), 1);
    std::vector<int> stations;
    wifi.SetTxObserver([&](const TxRecord& r) { stations.push_back(r.station); });
    bool delivered = false;
    wifi.Send(Direction::Downlink, Packet{0, 40, [&] { delivered = true; }, {}});
    sim.RunUntil(SimTime::Seconds(1));
    CHECK(delivered);
    CHECK(stations == std::vector<int>{wifi.ApIndex()});
}

TEST_CASE("transmissions never overlap unless flagged as a collision")
{
    auto ch = test::FlatChannel(5.18e9, 20e6);
    Simulator sim(8);
    const int n = 5;
    WifiNetwork wifi(sim, DcfParams{}, test::FixedLinks(*ch, {5, 6, 7, 8, 9, 0}, WifiMcsTable(), 20), n);
    std::vector<TxRecord> recs;
    wifi.SetTxObserver([&](const TxRecord& r) { recs.push_back(r); });
    for (int s = 0; s < n; ++s)
    {
        for (int i = 0; i < 100; ++i)
        {
            wifi.Send(Direction::Uplink, Packet{s, 1200, {}, {}});
        }
    }
    sim.RunUntil(SimTime::Seconds(5));
    REQUIRE(recs.size() >= 500);
    for (size_t i = 1; i < recs.size(); ++i)
    {
        const TxRecord& a = recs[i - 1];
        const TxRecord& b = recs[i];
        if (a.start == b.start)
        {
            CHECK(a.collided);
            CHECK(b.collided);
        }
        else
        {
            // next access waits at least SIFS + ACK + DIFS after the previous frame
            CHECK(b.start >= a.end + SimTime::Micros(16 + 44 + 34));
        }
    }
}
