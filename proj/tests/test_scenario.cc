#include "uavsim/scenario.h"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

using namespace uavsim;

namespace {

std::vector<std::vector<std::string>>
ParseCsv(const std::string& text, std::string* header = nullptr)
{
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    bool first = true;
    while (std::getline(in, line))
    {
        if (first)
        {
            first = false;
            if (header != nullptr)
            {
                *header = line;
            }
            continue;
        }
        std::vector<std::string> cols;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ','))
        {
            cols.push_back(cell);
        }
        if (!line.empty() && line.back() == ',')
        {
            cols.emplace_back();
        }
        rows.push_back(cols);
    }
    return rows;
}

RunOutput
Run(const std::string& text, uint64_t seed = 1)
{
    return RunScenario(ScenarioConfig::Parse(text), seed, "test");
}

} // namespace

TEST_CASE("ideal stub gives zero delay and full delivery")
{
    const RunOutput r = Run("technology = stub\napp = both\nhorizon_s = 5\n");
    REQUIRE(!r.records.empty());
    for (const PhiRecord& rec : r.records)
    {
        REQUIRE(rec.delta);
        CHECK(rec.delta->Us() == 0);
        for (uint8_t w : rec.omega)
        {
            CHECK(w == 1);
        }
    }
    CHECK(r.summary.taskBursts == 5);
    CHECK(r.summary.telemetryDeliveryRatio == 1.0);
}

TEST_CASE("fully lossy stub delivers nothing")
{
    const RunOutput r = Run("technology = stub\nstub.loss = 1\ntransport.mode = datagram\nhorizon_s = 3\n");
    for (const PhiRecord& rec : r.records)
    {
        for (uint8_t w : rec.omega)
        {
            CHECK(w == 0);
        }
        CHECK_FALSE(rec.delta);
    }
    CHECK(r.summary.uavPackets.delivered == 0);
    CHECK(r.summary.uavPackets.Dropped(DropLayer::Channel) == r.summary.uavPackets.emitted);
}

TEST_CASE("fixed stub delay is the telemetry delay")
{
    const RunOutput r = Run("technology = stub\nstub.delay_ms = 50\ntransport.mode = datagram\nhorizon_s = 3\n");
    int complete = 0;
    for (const PhiRecord& rec : r.records)
    {
        if (rec.delta)
        {
            CHECK(*rec.delta == SimTime::Millis(50));
            ++complete;
        }
    }
    // bursts emitted in the last 50 ms are still in flight at the horizon
    CHECK(complete == 29);
}

TEST_CASE("telemetry emission count over the horizon")
{
    const RunOutput r = Run("technology = stub\ntelemetry.freq_hz = 7\nhorizon_s = 9.5\n");
    CHECK(r.records.size() == static_cast<size_t>(std::floor(9.5 * 7)));
}

TEST_CASE("csv traces agree with the summary")
{
    const RunOutput r = Run("preset = high_load\ntechnology = wifi\napp = both\nhorizon_s = 4\n", 3);
    std::string header;
    const auto packets = ParseCsv(PacketsCsv(r), &header);
    CHECK(header == "run_id,burst_id,kind,seq,tau_us,emit_us,deliver_us,omega,layer_dropped");
    const auto bursts = ParseCsv(BurstsCsv(r), &header);
    CHECK(header == "run_id,burst_id,kind,size_bytes,n_packets,tau_us,delta_us,complete");
    const auto errors = ParseCsv(ErrorCsv(r), &header);
    CHECK(header == "run_id,t_us,true_x,true_y,true_z,est_x,est_y,est_z,err_m");

    // recompute every burst delay from the per-packet rows
    struct Acc
    {
        int64_t tau{0};
        int64_t latest{0};
        bool complete{true};
        std::string kind;
        size_t n{0};
    };
    std::map<uint64_t, Acc> acc;
    for (const auto& row : packets)
    {
        REQUIRE(row.size() == 9);
        Acc& a = acc[std::stoull(row[1])];
        a.kind = row[2];
        a.tau = std::stoll(row[4]);
        ++a.n;
        if (row[7] == "1")
        {
            CHECK(row[8].empty());
            a.latest = std::max<int64_t>(a.latest, std::stoll(row[6]));
        }
        else
        {
            CHECK(row[6].empty());
            CHECK_FALSE(row[8].empty());
            a.complete = false;
        }
    }
    REQUIRE(acc.size() == bursts.size());
    double taskSum = 0;
    int taskN = 0;
    for (const auto& row : bursts)
    {
        const Acc& a = acc.at(std::stoull(row[1]));
        CHECK(std::stoull(row[4]) == a.n);
        CHECK((row[7] == "1") == a.complete);
        if (a.complete)
        {
            const int64_t delta = std::max<int64_t>(0, a.latest - a.tau);
            CHECK(std::stoll(row[6]) == delta);
            if (a.kind == "task")
            {
                taskSum += static_cast<double>(delta) / 1000.0;
                ++taskN;
            }
        }
        else
        {
            CHECK(row[6].empty());
        }
    }
    REQUIRE(taskN > 0);
    CHECK(std::fabs(taskSum / taskN - r.summary.taskDelayMs.mean) <= 1e-9 * r.summary.taskDelayMs.mean);

    double errSum = 0;
    for (const auto& row : errors)
    {
        const double dx = std::stod(row[2]) - std::stod(row[5]);
        const double dy = std::stod(row[3]) - std::stod(row[6]);
        const double dz = std::stod(row[4]) - std::stod(row[7]);
        CHECK(std::fabs(std::sqrt(dx * dx + dy * dy + dz * dz) - std::stod(row[8])) <= 1e-9);
        errSum += std::stod(row[8]);
    }
    REQUIRE(!errors.empty());
    CHECK(std::fabs(errSum / static_cast<double>(errors.size()) - r.summary.positionErrorM.mean) <= 1e-9);
}

TEST_CASE("same seed reproduces packets.csv byte for byte")
{
    for (const char* tech : {"wifi", "lte"})
    {
        const std::string cfg = std::string("preset = high_load\napp = both\nhorizon_s = 3\ntechnology = ") + tech;
        CHECK(PacketsCsv(Run(cfg, 9)) == PacketsCsv(Run(cfg, 9)));
    }
    const std::string wifi = "preset = high_load\napp = both\nhorizon_s = 3\n";
    CHECK(PacketsCsv(Run(wifi, 9)) != PacketsCsv(Run(wifi, 10)));
}

TEST_CASE("every technology conserves packets")
{
    for (const char* tech : {"wifi", "lte", "stub"})
    {
        CAPTURE(tech);
        const RunOutput r =
            Run(std::string("preset = high_load\napp = both\nhorizon_s = 3\ntechnology = ") + tech + "\n", 2);
        CHECK(r.summary.uavPackets.Conserved());
        CHECK(r.summary.exogenousPackets.Conserved());
        if (std::string(tech) != "stub")
        {
            CHECK(r.summary.exogenousPackets.emitted > 0);
        }
    }
}

TEST_CASE("run csv files are written atomically")
{
    const auto dir = std::filesystem::temp_directory_path() / "uavsim_test_csv";
    std::filesystem::remove_all(dir);
    const RunOutput r = Run("technology = stub\nhorizon_s = 1\n");
    WriteRunCsvs(dir.string(), r);
    for (const char* f : {"packets.csv", "bursts.csv", "error.csv"})
    {
        CHECK(std::filesystem::exists(dir / f));
        CHECK_FALSE(std::filesystem::exists(dir / (std::string(f) + ".tmp")));
    }
    std::ifstream in(dir / "bursts.csv");
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(ss.str() == BurstsCsv(r));
    std::filesystem::remove_all(dir);
}
