#include "uavsim/apps.h"

#include <doctest.h>

#include <algorithm>
#include <stdexcept>
#include <vector>

using namespace uavsim;

namespace {

UavMobility
StraightLine(double speed)
{
    Trajectory t;
    t.waypoints = {{0, 0, 30}, {1e6, 0, 30}};
    t.cruiseSpeed = speed;
    t.loop = false;
    return UavMobility(WaypointPath(t));
}

} // namespace

TEST_CASE("telemetry schedule and snapshots")
{
    Simulator sim(1);
    const UavMobility uav = StraightLine(5);
    std::vector<Burst> bursts;
    TelemetrySource src(sim, 10, 128, uav, [&](Burst b) { bursts.push_back(std::move(b)); });
    src.Start();
    sim.RunUntil(SimTime::Seconds(2));
    REQUIRE(bursts.size() == 20);
    for (size_t i = 0; i < bursts.size(); ++i)
    {
        CHECK(bursts[i].index == i + 1);
        CHECK(bursts[i].tau == SimTime::Millis(100 * static_cast<int64_t>(i + 1)));
        CHECK(bursts[i].sizeBytes == 128);
        REQUIRE(bursts[i].payload);
        CHECK(bursts[i].payload->p.x == doctest::Approx(0.5 * static_cast<double>(i + 1)));
    }
}

TEST_CASE("telemetry emission count is floor of horizon times rate")
{
    for (double f : {1.0, 3.0, 7.0, 10.0, 50.0})
    {
        Simulator sim(1);
        const UavMobility uav = StraightLine(5);
        int n = 0;
        TelemetrySource src(sim, f, 128, uav, [&](Burst) { ++n; });
        src.Start();
        sim.RunUntil(SimTime::Seconds(9.5));
        CHECK(n == static_cast<int>(9.5 * f));
    }
    CHECK(TelemetrySource::EmissionTime(1, 3.0) == SimTime::Micros(333'333));
    CHECK(TelemetrySource::EmissionTime(2, 3.0) == SimTime::Micros(666'667));
}

TEST_CASE("telemetry rejects bad parameters")
{
    Simulator sim(1);
    const UavMobility uav = StraightLine(5);
    CHECK_THROWS_AS(TelemetrySource(sim, 0, 128, uav, {}), std::invalid_argument);
    CHECK_THROWS_AS(TelemetrySource(sim, 10, 0, uav, {}), std::invalid_argument);
}

TEST_CASE("task bursts every period")
{
    Simulator sim(1);
    std::vector<SimTime> taus;
    TaskSource src(sim, 50'000, SimTime::Seconds(1), [&](Burst b) {
        CHECK(b.kind == BurstKind::Task);
        CHECK(b.sizeBytes == 50'000);
        taus.push_back(b.tau);
    });
    src.Start();
    sim.RunUntil(SimTime::Seconds(3.5));
    CHECK(taus == std::vector<SimTime>{SimTime::Seconds(1), SimTime::Seconds(2), SimTime::Seconds(3)});
    CHECK_THROWS_AS(TaskSource(sim, 0, SimTime::Seconds(1), {}), std::invalid_argument);
}

TEST_CASE("exogenous interval")
{
    CHECK(ExogenousSource::IntervalS(6e6, 800) * 1e6 == doctest::Approx(800.0 * 8 / 6));
    CHECK(ExogenousSource::IntervalS(6e6, 800) * 1e6 == doctest::Approx(1066.7).epsilon(1e-4));
    CHECK(ExogenousSource::IntervalS(1e6, 800) * 1e6 == doctest::Approx(6400.0));
}

TEST_CASE("exogenous source keeps its rate")
{
    Simulator sim(1);
    RngStream& rng = sim.Stream("phase");
    std::vector<SimTime> sends;
    ExogenousSource src(sim, 3, 6e6, 800, rng, [&](int node, uint32_t bytes) {
        CHECK(node == 3);
        CHECK(bytes == 800);
        sends.push_back(sim.Now());
    });
    src.Start();
    sim.RunUntil(SimTime::Seconds(1));
    CHECK(sends.size() >= 937);
    CHECK(sends.size() <= 938);
    CHECK(sends.front() < SimTime::Micros(1067));
    CHECK_THROWS_AS(ExogenousSource(sim, 1, 0, 800, rng, {}), std::invalid_argument);
}

TEST_CASE("zero-order hold error grows with age")
{
    const UavMobility uav = StraightLine(5);
    Estimator e(EstimatorMode::ZeroOrderHold);
    CHECK_FALSE(e.HasEstimate());
    CHECK_THROWS(e.PositionAt(SimTime::Zero()));
    e.Ingest(uav.At(SimTime::Seconds(1)), SimTime::Seconds(1), SimTime::Seconds(1));
    for (double a : {0.0, 0.05, 0.3})
    {
        const SimTime t = SimTime::Seconds(1 + a);
        CHECK(PositionError(uav.At(t).p, e.PositionAt(t)) == doctest::Approx(5 * a));
    }
}

TEST_CASE("constant-velocity estimate is exact without delay")
{
    const UavMobility uav = StraightLine(5);
    Estimator e(EstimatorMode::ConstantVelocity);
    e.Ingest(uav.At(SimTime::Seconds(2)), SimTime::Seconds(2), SimTime::Seconds(2));
    for (int ms = 0; ms < 1000; ms += 37)
    {
        const SimTime t = SimTime::Seconds(2) + SimTime::Millis(ms);
        CHECK(PositionError(uav.At(t).p, e.PositionAt(t)) == doctest::Approx(0.0).epsilon(1e-9));
    }
}

TEST_CASE("stationary UAV gives zero error")
{
    Trajectory t;
    t.waypoints = {{0, 0, 30}, {10, 0, 30}};
    t.dwellS = 100;
    t.loop = false;
    const UavMobility uav{WaypointPath(t)};
    Estimator e(EstimatorMode::ZeroOrderHold);
    e.Ingest(uav.At(SimTime::Seconds(5)), SimTime::Seconds(5), SimTime::Seconds(5));
    CHECK(PositionError(uav.At(SimTime::Seconds(50)).p, e.PositionAt(SimTime::Seconds(50))) == 0.0);
}

TEST_CASE("older snapshots are ignored")
{
    Estimator e(EstimatorMode::ZeroOrderHold);
    UavState a;
    a.p = {1, 0, 0};
    UavState b;
    b.p = {2, 0, 0};
    CHECK(e.Ingest(b, SimTime::Millis(200), SimTime::Millis(210)));
    CHECK_FALSE(e.Ingest(a, SimTime::Millis(100), SimTime::Millis(220)));
    CHECK(e.PositionAt(SimTime::Millis(300)) == Vec3{2, 0, 0});
    CHECK(e.LastSnapshot() == SimTime::Millis(200));
}

TEST_CASE("planar error ignores altitude")
{
    CHECK(PositionError({0, 0, 0}, {3, 4, 12}) == doctest::Approx(13.0));
    CHECK(PositionError({0, 0, 0}, {3, 4, 12}, true) == doctest::Approx(5.0));
    CHECK(PositionError({1, 1, 1}, {1, 1, 1}) == 0.0);
}

TEST_CASE("ideal 10 Hz hold averages v T / 2 and peaks at v 2T after one loss")
{
    // v = 5 m/s, T = 0.1 s: sawtooth between 0 and 0.5 m, mean 0.25 m
    const UavMobility uav = StraightLine(5);
    Estimator e(EstimatorMode::ZeroOrderHold);
    double sum = 0;
    int n = 0;
    double peak = 0;
    const int lost = 25;
    for (int k = 1; k <= 50; ++k)
    {
        const SimTime tau = SimTime::Millis(100 * k);
        if (k != lost)
        {
            e.Ingest(uav.At(tau), tau, tau);
        }
        for (int j = 0; j < 100; ++j)
        {
            const SimTime t = tau + SimTime::Micros(500 + 1000 * j);
            const double err = PositionError(uav.At(t).p, e.PositionAt(t));
            peak = std::max(peak, err);
            if (k < lost - 1 || k > lost)
            {
                sum += err;
                ++n;
            }
        }
    }
    CHECK(sum / n == doctest::Approx(0.25).epsilon(0.05));
    CHECK(peak == doctest::Approx(1.0).epsilon(0.01));
}
