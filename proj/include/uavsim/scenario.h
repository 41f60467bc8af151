#pragma once

#include "uavsim/config.h"
#include "uavsim/lte_ran.h"
#include "uavsim/metrics.h"
#include "uavsim/wifi_dcf.h"

#include <functional>
#include <string>
#include <vector>

namespace uavsim {

/// Optional observers for white-box checks of a run.
struct RunHooks
{
    std::function<void(const TtiReport&)> onTti;
    std::function<void(const TxRecord&)> onWifiTx;
};

struct RunOutput
{
    std::string runId;
    uint64_t seed{0};
    std::vector<PhiRecord> records;
    std::vector<ErrorSample> errors;
    RunSummary summary;
};

/// Builds the scenario described by `cfg`, runs it to the horizon and
/// collects the per-burst and position-error traces.
RunOutput RunScenario(const ScenarioConfig& cfg, uint64_t seed, const std::string& runId, const RunHooks& hooks = {});

/// Channel settings taken from the pathloss/shadowing/radio keys.
ChannelConfig ChannelFromConfig(const ScenarioConfig& cfg);

/// packets.csv, bursts.csv and error.csv as strings.
std::string PacketsCsv(const RunOutput& run);
std::string BurstsCsv(const RunOutput& run);
std::string ErrorCsv(const RunOutput& run);

/// Writes `content` to `path` through a temporary file and a rename.
void WriteFileAtomic(const std::string& path, const std::string& content);
/// Writes the three per-run CSV files into `dir` (created if needed).
void WriteRunCsvs(const std::string& dir, const RunOutput& run);

} // namespace uavsim
