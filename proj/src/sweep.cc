#include "uavsim/sweep.h"

#include "uavsim/scenario.h"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fmt/format.h>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace uavsim {

namespace {

std::string
OptField(const std::optional<double>& v)
{
    return v ? fmt::format("{}", *v) : std::string();
}

std::optional<double>
ParseOpt(const std::string& s)
{
    if (s.empty())
    {
        return std::nullopt;
    }
    return std::stod(s);
}

std::vector<std::string>
SplitCsvLine(const std::string& line)
{
    std::vector<std::string> out;
    std::stringstream in(line);
    std::string field;
    while (std::getline(in, field, ','))
    {
        out.push_back(field);
    }
    if (!line.empty() && line.back() == ',')
    {
        out.emplace_back();
    }
    return out;
}

} // namespace

std::string
SweepMetric(const ScenarioConfig& cfg)
{
    return cfg.Text("app") == "task" ? "task_delay_ms" : "position_error_m";
}

std::optional<Stats>
RunMetric(const RunSummary& s, const std::string& metric)
{
    const Stats& st = metric == "task_delay_ms" ? s.taskDelayMs : s.positionErrorM;
    if (st.n == 0)
    {
        return std::nullopt;
    }
    return st;
}

AggregateRow
Aggregate(const std::string& param,
          const std::string& value,
          const std::string& metric,
          const std::vector<std::optional<Stats>>& perSeed)
{
    AggregateRow row;
    row.sweepParam = param;
    row.value = value;
    row.metric = metric;
    row.nSeeds = static_cast<int>(perSeed.size());
    if (perSeed.empty())
    {
        return row;
    }
    for (const auto& s : perSeed)
    {
        if (!s)
        {
            return row;
        }
    }
    const double n = static_cast<double>(perSeed.size());
    double mean = 0;
    double p95 = 0;
    for (const auto& s : perSeed)
    {
        mean += s->mean;
        p95 += s->p95;
    }
    mean /= n;
    double sq = 0;
    for (const auto& s : perSeed)
    {
        sq += (s->mean - mean) * (s->mean - mean);
    }
    row.mean = mean;
    row.variance = perSeed.size() > 1 ? sq / (n - 1) : 0.0;
    row.p95 = p95 / n;
    return row;
}

std::string
AggregateCsv(const std::vector<AggregateRow>& rows)
{
    std::string s = "sweep_param,value,metric,mean,variance,p95,n_seeds\n";
    for (const AggregateRow& r : rows)
    {
        s += fmt::format("{},{},{},{},{},{},{}\n",
                         r.sweepParam,
                         r.value,
                         r.metric,
                         OptField(r.mean),
                         OptField(r.variance),
                         OptField(r.p95),
                         r.nSeeds);
    }
    return s;
}

std::vector<AggregateRow>
ReadAggregateCsv(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
    {
        throw std::runtime_error(fmt::format("cannot read {}", path));
    }
    std::string line;
    std::getline(in, line);
    if (line != "sweep_param,value,metric,mean,variance,p95,n_seeds")
    {
        throw std::runtime_error(fmt::format("{}: unexpected header", path));
    }
    std::vector<AggregateRow> rows;
    while (std::getline(in, line))
    {
        if (line.empty())
        {
            continue;
        }
        const auto f = SplitCsvLine(line);
        if (f.size() != 7)
        {
            throw std::runtime_error(fmt::format("{}: malformed row '{}'", path, line));
        }
        AggregateRow r;
        r.sweepParam = f[0];
        r.value = f[1];
        r.metric = f[2];
        r.mean = ParseOpt(f[3]);
        r.variance = ParseOpt(f[4]);
        r.p95 = ParseOpt(f[5]);
        r.nSeeds = std::stoi(f[6]);
        rows.push_back(std::move(r));
    }
    return rows;
}

int
WorkerCount()
{
    if (const char* env = std::getenv("UAVSIM_WORKERS"))
    {
        const int n = std::atoi(env);
        if (n > 0)
        {
            return n;
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

ScenarioConfig
PointConfig(const ScenarioConfig& base, const std::string& param, const std::string& value)
{
    ScenarioConfig cfg = base;
    cfg.Set(param, value);
    return cfg;
}

SweepResult
RunSweep(const ScenarioConfig& base, const SweepSpec& spec, const std::string& outDir, int workers, std::ostream& log)
{
    namespace fs = std::filesystem;
    fs::create_directories(outDir);
    WriteFileAtomic(outDir + "/scenario.cfg", base.Serialize());

    // validate every point before running anything
    std::vector<ScenarioConfig> configs;
    for (const std::string& v : spec.values)
    {
        configs.push_back(PointConfig(base, spec.param, v));
    }

    struct Job
    {
        size_t point;
        int seed;
    };
    std::vector<Job> jobs;
    for (size_t p = 0; p < spec.values.size(); ++p)
    {
        for (int s = 1; s <= spec.seeds; ++s)
        {
            jobs.push_back({p, s});
        }
    }
    std::vector<std::optional<RunSummary>> results(jobs.size());
    std::atomic<size_t> next{0};
    std::mutex logMutex;
    auto worker = [&] {
        for (size_t j = next++; j < jobs.size(); j = next++)
        {
            const Job& job = jobs[j];
            const std::string point = fmt::format("{}={}", spec.param, spec.values[job.point]);
            const std::string runId = fmt::format("{}/seed-{}", point, job.seed);
            try
            {
                RunOutput run = RunScenario(configs[job.point], static_cast<uint64_t>(job.seed), runId);
                WriteRunCsvs(fmt::format("{}/runs/{}/seed-{}", outDir, point, job.seed), run);
                results[j] = run.summary;
            }
            catch (const std::exception& e)
            {
                std::lock_guard lock(logMutex);
                log << fmt::format("run {} failed: {}\n", runId, e.what());
            }
        }
    };
    std::vector<std::thread> pool;
    const int n = std::max(1, std::min<int>(workers, static_cast<int>(jobs.size())));
    for (int i = 0; i < n; ++i)
    {
        pool.emplace_back(worker);
    }
    for (auto& t : pool)
    {
        t.join();
    }

    SweepResult out;
    for (size_t p = 0; p < spec.values.size(); ++p)
    {
        const std::string metric = SweepMetric(configs[p]);
        std::vector<std::optional<Stats>> perSeed;
        for (size_t j = 0; j < jobs.size(); ++j)
        {
            if (jobs[j].point != p)
            {
                continue;
            }
            if (!results[j])
            {
                ++out.failures;
                continue;
            }
            perSeed.push_back(RunMetric(*results[j], metric));
        }
        out.rows.push_back(Aggregate(spec.param, spec.values[p], metric, perSeed));
    }
    WriteFileAtomic(outDir + "/aggregate.csv", AggregateCsv(out.rows));
    return out;
}

std::string
CompareReport(const std::vector<AggregateRow>& a,
              const std::vector<AggregateRow>& b,
              const std::string& labelA,
              const std::string& labelB)
{
    if (a.size() != b.size())
    {
        throw std::runtime_error(fmt::format("sweep axes differ: {} vs {} points", a.size(), b.size()));
    }
    for (size_t i = 0; i < a.size(); ++i)
    {
        if (a[i].sweepParam != b[i].sweepParam || a[i].value != b[i].value || a[i].metric != b[i].metric)
        {
            throw std::runtime_error(fmt::format("sweep axes differ at row {}: {}={} ({}) vs {}={} ({})",
                                                 i + 1,
                                                 a[i].sweepParam,
                                                 a[i].value,
                                                 a[i].metric,
                                                 b[i].sweepParam,
                                                 b[i].value,
                                                 b[i].metric));
        }
    }
    auto show = [](const std::optional<double>& v) { return v ? fmt::format("{:.4f}", *v) : std::string("inf"); };
    std::string s;
    if (!a.empty())
    {
        s += fmt::format("metric: {} (lower is better)\n", a.front().metric);
    }
    s += fmt::format("{:<24} {:>14} {:>14}  {}\n", a.empty() ? "point" : a.front().sweepParam, labelA, labelB, "winner");
    std::string previous;
    std::string previousValue;
    std::vector<std::string> crossovers;
    for (size_t i = 0; i < a.size(); ++i)
    {
        const auto& x = a[i].mean;
        const auto& y = b[i].mean;
        std::string winner;
        if (!x && !y)
        {
            winner = "tie";
        }
        else if (!y)
        {
            winner = labelA;
        }
        else if (!x)
        {
            winner = labelB;
        }
        else if (std::abs(*x - *y) <= 1e-9 * std::max({1.0, std::abs(*x), std::abs(*y)}))
        {
            winner = "tie";
        }
        else
        {
            winner = *x < *y ? labelA : labelB;
        }
        s += fmt::format("{:<24} {:>14} {:>14}  {}\n", a[i].value, show(x), show(y), winner);
        if (winner != "tie")
        {
            if (!previous.empty() && previous != winner)
            {
                crossovers.push_back(fmt::format("between {} and {}", previousValue, a[i].value));
            }
            previous = winner;
            previousValue = a[i].value;
        }
    }
    if (crossovers.empty())
    {
        s += "crossovers: none\n";
    }
    else
    {
        for (const auto& c : crossovers)
        {
            s += fmt::format("crossover {}\n", c);
        }
    }
    return s;
}

} // namespace uavsim
