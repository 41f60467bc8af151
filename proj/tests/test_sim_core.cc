#include "uavsim/simulator.h"

#include <doctest.h>

#include <string>
#include <vector>

using namespace uavsim;

TEST_CASE("event at time zero fires first")
{
    Simulator sim(1);
    const TargetId t = sim.RegisterTarget("t");
    std::vector<int> order;
    sim.Schedule(SimTime::Millis(5), t, [&] { order.push_back(2); });
    sim.Schedule(SimTime::Zero(), t, [&] { order.push_back(1); });
    sim.RunUntil(SimTime::Seconds(1));
    CHECK(order == std::vector<int>{1, 2});
}

TEST_CASE("equal timestamps dispatch in insertion order")
{
    Simulator sim(1);
    const TargetId t = sim.RegisterTarget("t");
    std::vector<int> order;
    for (int i = 0; i < 10; ++i)
    {
        sim.Schedule(SimTime::Micros(100), t, [&, i] { order.push_back(i); });
    }
    sim.RunUntil(SimTime::Seconds(1));
    CHECK(order == std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9});
}

TEST_CASE("scheduling in the past is an error")
{
    Simulator sim(1);
    const TargetId t = sim.RegisterTarget("t");
    bool threw = false;
    sim.Schedule(SimTime::Micros(50), t, [&] {
        try
        {
            sim.Schedule(SimTime::Micros(20), t, [] {});
        }
        catch (const SimError&)
        {
            threw = true;
        }
    });
    sim.RunUntil(SimTime::Seconds(1));
    CHECK(threw);
}

TEST_CASE("unknown target aborts the run")
{
    Simulator sim(1);
    sim.Schedule(SimTime::Micros(1), 99, [] {});
    CHECK_THROWS_AS(sim.RunUntil(SimTime::Seconds(1)), SimError);
}

TEST_CASE("empty queue advances the clock")
{
    Simulator sim(1);
    const RunStats s = sim.RunUntil(SimTime::Seconds(10));
    CHECK(s.dispatched == 0);
    CHECK(sim.Now() == SimTime::Seconds(10));
}

TEST_CASE("run_until is inclusive of the end time")
{
    Simulator sim(1);
    const TargetId t = sim.RegisterTarget("t");
    int fired = 0;
    for (int s = 1; s <= 3; ++s)
    {
        sim.Schedule(SimTime::Seconds(s), t, [&] { ++fired; });
    }
    const RunStats st = sim.RunUntil(SimTime::Seconds(2));
    CHECK(st.dispatched == 2);
    CHECK(fired == 2);
}

TEST_CASE("cancelled events never fire")
{
    Simulator sim(1);
    const TargetId t = sim.RegisterTarget("t");
    int fired = 0;
    const EventHandle h = sim.Schedule(SimTime::Micros(10), t, [&] { ++fired; });
    sim.Schedule(SimTime::Micros(20), t, [&] { ++fired; });
    sim.Cancel(h);
    sim.Cancel(h);
    sim.Cancel(EventHandle{});
    sim.RunUntil(SimTime::Seconds(1));
    CHECK(fired == 1);
}

namespace {

std::string
TraceOf(uint64_t seed)
{
    Simulator sim(seed);
    const TargetId t = sim.RegisterTarget("jitter");
    RngStream& rng = sim.Stream("jitter");
    std::string trace;
    sim.SetTraceSink([&](const TraceEntry& e) {
        trace += std::to_string(e.fireAt.Us()) + ":" + std::to_string(e.sequence) + ";";
    });
    std::function<void()> step = [&] {
        if (sim.Now() < SimTime::Seconds(1))
        {
            sim.ScheduleIn(SimTime::Micros(static_cast<int64_t>(rng.UniformInt(1000))), t, step);
        }
    };
    sim.Schedule(SimTime::Zero(), t, step);
    sim.RunUntil(SimTime::Seconds(2));
    return trace;
}

} // namespace

TEST_CASE("same seed gives an identical event trace")
{
    CHECK(TraceOf(42) == TraceOf(42));
    CHECK(TraceOf(42) != TraceOf(43));
}

TEST_CASE("rng streams are reproducible and label separated")
{
    RngStream a(7, "wifi.backoff");
    RngStream b(7, "wifi.backoff");
    RngStream c(7, "a");
    RngStream d(7, "b");
    bool cdDiffer = false;
    for (int i = 0; i < 100; ++i)
    {
        CHECK(a.NextU64() == b.NextU64());
        cdDiffer = cdDiffer || c.NextU64() != d.NextU64();
    }
    CHECK(cdDiffer);
}

TEST_CASE("uniform draws average one half")
{
    RngStream r(1, "lln");
    double sum = 0;
    const int n = 1000000;
    for (int i = 0; i < n; ++i)
    {
        sum += r.Uniform();
    }
    const double mean = sum / n;
    CHECK(mean >= 0.499);
    CHECK(mean <= 0.501);
}

TEST_CASE("uniform integers stay in range")
{
    RngStream r(3, "int");
    std::vector<int> hits(16, 0);
    for (int i = 0; i < 16000; ++i)
    {
        const uint64_t v = r.UniformInt(15);
        REQUIRE(v <= 15);
        ++hits[v];
    }
    for (int h : hits)
    {
        CHECK(h > 800);
    }
}

TEST_CASE("simulator streams are cached by label")
{
    Simulator sim(9);
    CHECK(&sim.Stream("x") == &sim.Stream("x"));
    CHECK(&sim.Stream("x") != &sim.Stream("y"));
}
