#include "uavsim/config.h"
#include "uavsim/scenario.h"
#include "uavsim/sweep.h"

#include <CLI11.hpp>
#include <filesystem>
#include <fmt/format.h>
#include <iostream>
#include <sstream>

using namespace uavsim;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitPartialSweep = 3;

std::vector<std::string>
SplitList(const std::string& s)
{
    std::vector<std::string> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ','))
    {
        if (!item.empty())
        {
            out.push_back(item);
        }
    }
    return out;
}

std::string
LabelFor(const std::string& dir, const std::string& fallback)
{
    const std::string cfg = dir + "/scenario.cfg";
    if (std::filesystem::exists(cfg))
    {
        try
        {
            return ScenarioConfig::Load(cfg).Text("technology");
        }
        catch (const ConfigError&)
        {
        }
    }
    return fallback;
}

void
PrintSummary(const RunSummary& s)
{
    fmt::print("seed {}\n", s.seed);
    fmt::print("position error [m]: mean {:.4f} var {:.4f} p95 {:.4f} (n={})\n",
               s.positionErrorM.mean,
               s.positionErrorM.variance,
               s.positionErrorM.p95,
               s.positionErrorM.n);
    fmt::print("task delay [ms]: mean {:.3f} var {:.3f} p95 {:.3f} (n={}, incomplete {:.3f})\n",
               s.taskDelayMs.mean,
               s.taskDelayMs.variance,
               s.taskDelayMs.p95,
               s.taskDelayMs.n,
               s.incompleteTaskFraction);
    fmt::print("uav packets: emitted {} delivered {} mac {} queue {} rlc {} channel {} in-flight {} (ratio {:.4f})\n",
               s.uavPackets.emitted,
               s.uavPackets.delivered,
               s.uavPackets.Dropped(DropLayer::Mac),
               s.uavPackets.Dropped(DropLayer::Queue),
               s.uavPackets.Dropped(DropLayer::Rlc),
               s.uavPackets.Dropped(DropLayer::Channel),
               s.uavPackets.inFlight,
               s.deliveryRatio);
    fmt::print("exogenous packets: emitted {} delivered {} mac {} queue {} rlc {} in-flight {}\n",
               s.exogenousPackets.emitted,
               s.exogenousPackets.delivered,
               s.exogenousPackets.Dropped(DropLayer::Mac),
               s.exogenousPackets.Dropped(DropLayer::Queue),
               s.exogenousPackets.Dropped(DropLayer::Rlc),
               s.exogenousPackets.inFlight);
}

} // namespace

int
main(int argc, char** argv)
{
    CLI::App app{"Discrete-event simulator of infrastructure-assisted UAV operations"};
    app.require_subcommand(1);

    std::string scenario;
    std::string out;
    uint64_t seed = 1;
    auto* simulate = app.add_subcommand("simulate", "Run one scenario");
    simulate->add_option("--scenario", scenario, "Scenario file")->required();
    simulate->add_option("--seed", seed, "Root seed");
    simulate->add_option("--out", out, "Output directory")->required();

    std::string param;
    std::string values;
    int seeds = 10;
    auto* sweep = app.add_subcommand("sweep", "Run a parameter sweep over seeds 1..N");
    sweep->add_option("--scenario", scenario, "Scenario file")->required();
    sweep->add_option("--param", param, "Config key (or preset)")->required();
    sweep->add_option("--values", values, "Comma-separated values")->required();
    sweep->add_option("--seeds", seeds, "Seeds per point")->check(CLI::PositiveNumber);
    sweep->add_option("--out", out, "Output directory")->required();

    std::string dirA;
    std::string dirB;
    auto* report = app.add_subcommand("report", "Compare two sweeps point by point");
    report->add_option("--a", dirA, "First sweep directory")->required();
    report->add_option("--b", dirB, "Second sweep directory")->required();

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitValidation;
    }

    try
    {
        if (*simulate)
        {
            const ScenarioConfig cfg = ScenarioConfig::Load(scenario);
            const RunOutput run = RunScenario(cfg, seed, fmt::format("seed-{}", seed));
            std::filesystem::create_directories(out);
            WriteFileAtomic(out + "/scenario.cfg", cfg.Serialize());
            WriteRunCsvs(out, run);
            PrintSummary(run.summary);
            return 0;
        }
        if (*sweep)
        {
            const ScenarioConfig cfg = ScenarioConfig::Load(scenario);
            SweepSpec spec{param, SplitList(values), seeds};
            if (spec.values.empty())
            {
                throw ConfigError(param, "no sweep values");
            }
            const SweepResult res = RunSweep(cfg, spec, out, WorkerCount(), std::cerr);
            std::cout << AggregateCsv(res.rows);
            if (res.failures > 0)
            {
                fmt::print(stderr, "{} run(s) failed\n", res.failures);
                return kExitPartialSweep;
            }
            return 0;
        }
        const auto a = ReadAggregateCsv(dirA + "/aggregate.csv");
        const auto b = ReadAggregateCsv(dirB + "/aggregate.csv");
        std::string la = LabelFor(dirA, "A");
        std::string lb = LabelFor(dirB, "B");
        if (la == lb)
        {
            la += " (a)";
            lb += " (b)";
        }
        std::cout << CompareReport(a, b, la, lb);
        return 0;
    }
    catch (const ConfigError& e)
    {
        fmt::print(stderr, "configuration error: {}\n", e.what());
        return kExitValidation;
    }
    catch (const std::exception& e)
    {
        fmt::print(stderr, "error: {}\n", e.what());
        // a report over mismatched sweeps is a validation failure
        return *report ? kExitValidation : 1;
    }
}
