#pragma once

#include "uavsim/config.h"
#include "uavsim/metrics.h"

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace uavsim {

struct SweepSpec
{
    std::string param;  ///< config key, or "preset"
    std::vector<std::string> values;
    int seeds{1};
};

/// One aggregate.csv row. A nullopt mean stands for an unbounded value
/// (some seed never produced a finite sample, e.g. a disconnected link).
struct AggregateRow
{
    std::string sweepParam;
    std::string value;
    std::string metric;
    std::optional<double> mean;
    std::optional<double> variance;
    std::optional<double> p95;
    int nSeeds{0};
};

/// position_error_m for telemetry scenarios, task_delay_ms for task ones.
std::string SweepMetric(const ScenarioConfig& cfg);
/// Per-run statistic of `metric`; nullopt when the run has no finite sample.
std::optional<Stats> RunMetric(const RunSummary& s, const std::string& metric);

/// Mean of the per-seed means, sample variance of the per-seed means and
/// mean of the per-seed 95th percentiles.
AggregateRow Aggregate(const std::string& param,
                       const std::string& value,
                       const std::string& metric,
                       const std::vector<std::optional<Stats>>& perSeed);

std::string AggregateCsv(const std::vector<AggregateRow>& rows);
/// Throws std::runtime_error on a malformed file.
std::vector<AggregateRow> ReadAggregateCsv(const std::string& path);

struct SweepResult
{
    std::vector<AggregateRow> rows;
    int failures{0};
};

/// Worker count from UAVSIM_WORKERS, else the hardware concurrency.
int WorkerCount();

/**
 * Runs every (value, seed) pair, seeds 1..N, writing per-run CSVs under
 * outDir/runs/<param>=<value>/seed-<s>/ plus outDir/scenario.cfg and
 * outDir/aggregate.csv. Failed runs are logged and skipped.
 */
SweepResult RunSweep(const ScenarioConfig& base, const SweepSpec& spec, const std::string& outDir, int workers, std::ostream& log);

/// Config for one sweep point; throws ConfigError for an invalid value.
ScenarioConfig PointConfig(const ScenarioConfig& base, const std::string& param, const std::string& value);

/// Per-point winner table (lower metric wins, unbounded loses) with
/// crossover points. Throws std::runtime_error on mismatched sweep axes.
std::string CompareReport(const std::vector<AggregateRow>& a,
                          const std::vector<AggregateRow>& b,
                          const std::string& labelA,
                          const std::string& labelB);

} // namespace uavsim
