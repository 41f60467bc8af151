#include "uavsim/config.h"

#include <doctest.h>

#include <string>

using namespace uavsim;

namespace {

std::string
KeyOf(const std::string& text)
{
    try
    {
        ScenarioConfig::Parse(text);
    }
    catch (const ConfigError& e)
    {
        return e.Key();
    }
    return "<no error>";
}

} // namespace

TEST_CASE("empty file gives every default")
{
    const ScenarioConfig c = ScenarioConfig::Parse("");
    CHECK(c.Serialize() == ScenarioConfig().Serialize());
    CHECK(c.Text("technology") == "wifi");
    CHECK(c.Text("wifi.standard") == "802.11a");
    CHECK(c.Int("ground.n_nodes") == 0);
    CHECK(c.Real("telemetry.freq_hz") == 10.0);
    CHECK(c.Int("telemetry.payload_bytes") == 128);
    CHECK(c.Real("task.size_kb") == 50.0);
    CHECK(c.Real("exogenous.rate_mbps") == 6.0);
    CHECK(c.Int("exogenous.packet_bytes") == 800);
    CHECK(c.Int("lte.n_prb") == 100);
    CHECK(c.Real("horizon_s") == 60.0);
    for (const KeySpec& k : ConfigSchema())
    {
        CHECK(c.Serialize().find(k.name + " = ") != std::string::npos);
    }
}

TEST_CASE("range and type errors name the key")
{
    CHECK(KeyOf("ground.n_nodes = -1") == "ground.n_nodes");
    CHECK(KeyOf("ground.n_nodes = 2.5") == "ground.n_nodes");
    CHECK(KeyOf("exogenous.rate_mbps = 0") == "exogenous.rate_mbps");
    CHECK(KeyOf("technology = bluetooth") == "technology");
    CHECK(KeyOf("uav.speed_mps = fast") == "uav.speed_mps");
    CHECK(KeyOf("no.such.key = 1") == "no.such.key");
    CHECK(KeyOf("horizon_s = 10\nhorizon_s = 20") == "horizon_s");
    CHECK(KeyOf("lte.bandwidth_mhz = 5\nlte.n_prb = 50") == "lte.n_prb");
    CHECK(KeyOf("preset = warp_speed") == "preset");
    CHECK(KeyOf("preset = low_distance, high_distance") == "preset");
    CHECK_THROWS_AS(ScenarioConfig::Parse("just some words"), ConfigError);
}

TEST_CASE("comments and whitespace are ignored")
{
    const ScenarioConfig c = ScenarioConfig::Parse("# header\n\n  technology   =  lte  # inline\n");
    CHECK(c.Text("technology") == "lte");
}

TEST_CASE("presets expand and explicit keys override them")
{
    const ScenarioConfig hi = ScenarioConfig::Parse("preset = high_load");
    CHECK(hi.Int("ground.n_nodes") == 8);
    CHECK(hi.Real("exogenous.rate_mbps") == 6.0);

    const ScenarioConfig mix = ScenarioConfig::Parse("ground.n_nodes = 3\npreset = high_load, low_distance");
    CHECK(mix.Int("ground.n_nodes") == 3);
    CHECK(mix.Text("uav.trajectory") == "orbit");
    CHECK(mix.Real("uav.orbit_radius_m") == 10.0);

    CHECK(ScenarioConfig::Parse("preset = no_load").Int("ground.n_nodes") == 0);
    CHECK(ScenarioConfig::Parse("preset = high_distance").Real("uav.orbit_radius_m") == 40.0);
}

TEST_CASE("serialization round-trips to a fixed point")
{
    const std::string text = "preset = high_load\ntechnology = lte\nuav.speed_mps = 7.50\ntask.size_kb=150\n";
    const ScenarioConfig a = ScenarioConfig::Parse(text);
    const std::string once = a.Serialize();
    const std::string twice = ScenarioConfig::Parse(once).Serialize();
    CHECK(once == twice);
    CHECK(ScenarioConfig::Parse(twice).Real("uav.speed_mps") == 7.5);
    CHECK(ScenarioConfig::Parse(twice).Int("ground.n_nodes") == 8);
}

TEST_CASE("accessors check the key type")
{
    const ScenarioConfig c;
    CHECK_THROWS_AS(c.Int("technology"), ConfigError);
    CHECK_THROWS_AS(c.Real("technology"), ConfigError);
    CHECK_THROWS_AS(c.Text("nope"), ConfigError);
    CHECK_THROWS_AS(ScenarioConfig::Load("/nonexistent/scenario.cfg"), ConfigError);
}
