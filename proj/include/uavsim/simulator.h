#pragma once

#include "uavsim/rng.h"
#include "uavsim/sim_time.h"

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <queue>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

namespace uavsim {

/// Raised on model bugs detected by the engine (past events, unknown targets).
class SimError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

using TargetId = uint32_t;

struct Event
{
    SimTime fireAt;
    uint64_t sequence{0};
    TargetId target{0};
    std::function<void()> payload;
};

struct EventHandle
{
    uint64_t sequence{0};
    bool Valid() const { return sequence != 0; }
};

struct RunStats
{
    uint64_t dispatched{0};
    SimTime clock;
};

struct TraceEntry
{
    SimTime fireAt;
    uint64_t sequence;
    TargetId target;
};

/**
 * Single-threaded discrete-event engine. Events are dispatched in
 * (fireAt, sequence) order, where sequence is the insertion counter, so equal
 * timestamps resolve FIFO.
 */
class Simulator
{
  public:
    explicit Simulator(uint64_t seed);

    Simulator(const Simulator&) = delete;
    Simulator& operator=(const Simulator&) = delete;

    /// Registers a named event target. Events addressed to ids that were
    /// never registered abort the run at dispatch.
    TargetId RegisterTarget(const std::string& name);
    const std::string& TargetName(TargetId id) const;

    EventHandle Schedule(SimTime at, TargetId target, std::function<void()> fn);
    EventHandle ScheduleIn(SimTime delay, TargetId target, std::function<void()> fn)
    {
        return Schedule(m_now + delay, target, std::move(fn));
    }
    /// Cancelling an already-dispatched or invalid handle is a no-op.
    void Cancel(EventHandle handle);

    RunStats RunUntil(SimTime end);

    SimTime Now() const { return m_now; }
    uint64_t Seed() const { return m_seed; }
    size_t Pending() const { return m_queue.size() - m_cancelled.size(); }

    /// Substream derived from (root seed, label). The same label always
    /// returns the same object.
    RngStream& Stream(const std::string& label);

    void SetTraceSink(std::function<void(const TraceEntry&)> sink) { m_trace = std::move(sink); }

  private:
    struct Later
    {
        bool operator()(const Event& a, const Event& b) const
        {
            if (a.fireAt != b.fireAt)
            {
                return a.fireAt > b.fireAt;
            }
            return a.sequence > b.sequence;
        }
    };

    uint64_t m_seed;
    SimTime m_now;
    uint64_t m_nextSequence{1};
    std::priority_queue<Event, std::vector<Event>, Later> m_queue;
    std::unordered_set<uint64_t> m_cancelled;
    std::vector<std::string> m_targets;
    std::map<std::string, std::unique_ptr<RngStream>> m_streams;
    std::function<void(const TraceEntry&)> m_trace;
};

} // namespace uavsim
