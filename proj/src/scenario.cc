#include "uavsim/scenario.h"

#include "uavsim/stub_network.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fmt/format.h>
#include <fstream>
#include <memory>
#include <stdexcept>

namespace uavsim {

namespace {

constexpr uint32_t kUdpHeaderBytes = 28;

/// Glue between the application sources, the transports and the ledger.
class UavApplications
{
  public:
    UavApplications(Simulator& sim,
                    const ScenarioConfig& cfg,
                    AccessNetwork& net,
                    const UavMobility& uav,
                    PhiCollector& phi,
                    Estimator& estimator)
        : m_sim(sim),
          m_phi(phi),
          m_estimator(estimator)
    {
        const std::string& app = cfg.Text("app");
        const bool reliable = cfg.Text("transport.mode") == "reliable";
        TcpParams tcp;
        tcp.mss = static_cast<uint32_t>(cfg.Int("transport.mss"));
        tcp.minRto = SimTime::Millis(cfg.Int("transport.min_rto_ms"));
        tcp.sendBufferBytes = static_cast<uint64_t>(cfg.Int("transport.send_buffer_bytes"));

        auto makeTransport = [&]() -> std::unique_ptr<Transport> {
            if (reliable)
            {
                return std::make_unique<ReliableConnection>(sim, net, 0, tcp, &phi);
            }
            return std::make_unique<DatagramSocket>(sim, net, 0, tcp.mss, kUdpHeaderBytes, &phi);
        };

        if (app == "telemetry" || app == "both")
        {
            m_telemetryTx = makeTransport();
            m_telemetry = std::make_unique<TelemetrySource>(sim,
                                                            cfg.Real("telemetry.freq_hz"),
                                                            static_cast<uint32_t>(cfg.Int("telemetry.payload_bytes")),
                                                            uav,
                                                            [this](Burst b) { OnTelemetry(std::move(b)); });
            m_telemetry->Start();
        }
        if (app == "task" || app == "both")
        {
            m_taskTx = makeTransport();
            const auto bytes = static_cast<uint64_t>(std::llround(cfg.Real("task.size_kb") * 1000.0));
            m_task = std::make_unique<TaskSource>(sim,
                                                  bytes,
                                                  SimTime::Seconds(cfg.Real("task.period_s")),
                                                  [this](Burst b) { OnTask(std::move(b)); });
            m_task->Start();
        }
    }

  private:
    void OnTelemetry(Burst b)
    {
        const uint64_t id = m_phi.Register(b, m_telemetryTx->PacketsFor(b.sizeBytes));
        const UavState snapshot = *b.payload;
        const SimTime tau = b.tau;
        m_telemetryTx->SendBurst(
            {id, b.sizeBytes, [this, snapshot, tau] { m_estimator.Ingest(snapshot, tau, m_sim.Now()); }});
    }

    void OnTask(Burst b)
    {
        const uint64_t id = m_phi.Register(b, m_taskTx->PacketsFor(b.sizeBytes));
        m_taskTx->SendBurst({id, b.sizeBytes, nullptr});
    }

    Simulator& m_sim;
    PhiCollector& m_phi;
    Estimator& m_estimator;
    std::unique_ptr<Transport> m_telemetryTx;
    std::unique_ptr<Transport> m_taskTx;
    std::unique_ptr<TelemetrySource> m_telemetry;
    std::unique_ptr<TaskSource> m_task;
};

/// Periodic position-error sampling at (k + 1/2) * step.
class ErrorSampler
{
  public:
    ErrorSampler(Simulator& sim, SimTime step, const UavMobility& uav, const Estimator& est, bool planar)
        : m_sim(sim),
          m_step(step),
          m_uav(uav),
          m_est(est),
          m_planar(planar),
          m_target(sim.RegisterTarget("gcs.error"))
    {
    }

    void Start()
    {
        m_sim.Schedule(SimTime::Micros(m_step.Us() / 2), m_target, [this] { Sample(); });
    }

    std::vector<ErrorSample> Take() { return std::move(m_samples); }

  private:
    void Sample()
    {
        const SimTime now = m_sim.Now();
        if (m_est.HasEstimate())
        {
            ErrorSample s;
            s.t = now;
            s.truth = m_uav.At(now).p;
            s.estimate = m_est.PositionAt(now);
            s.error = PositionError(s.truth, s.estimate, m_planar);
            m_samples.push_back(s);
        }
        m_sim.ScheduleIn(m_step, m_target, [this] { Sample(); });
    }

    Simulator& m_sim;
    SimTime m_step;
    const UavMobility& m_uav;
    const Estimator& m_est;
    bool m_planar;
    TargetId m_target;
    std::vector<ErrorSample> m_samples;
};

UavMobility
MobilityFromConfig(const ScenarioConfig& cfg)
{
    const double alt = cfg.Real("uav.altitude_m");
    const double speed = cfg.Real("uav.speed_mps");
    const double drain = cfg.Real("uav.battery_drain_per_s");
    if (cfg.Text("uav.trajectory") == "orbit")
    {
        return UavMobility(OrbitPath({0, 0, 0}, cfg.Real("uav.orbit_radius_m"), alt, speed), drain);
    }
    Trajectory t = RectangleTrajectory({0, 0, 0},
                                       cfg.Real("uav.rect_width_m"),
                                       cfg.Real("uav.rect_height_m"),
                                       alt,
                                       speed,
                                       cfg.Real("uav.dwell_s"));
    t.batteryDrainPerS = drain;
    return UavMobility(WaypointPath(std::move(t)));
}

std::string
TimeField(const std::optional<SimTime>& t)
{
    return t ? std::to_string(t->Us()) : std::string();
}

} // namespace

ChannelConfig
ChannelFromConfig(const ScenarioConfig& cfg)
{
    ChannelConfig c;
    c.regime = cfg.Text("pathloss.regime") == "los" ? Regime::Los : Regime::Nlos;
    c.cOffsetDb = cfg.Real("pathloss.c_offset_db");
    c.diffractionCoeffDb = cfg.Real("pathloss.diffraction_coeff_db");
    c.diffractionFloorDb = cfg.Real("pathloss.diffraction_floor_db");
    c.wallLossDb = cfg.Real("pathloss.l_ew_db");
    c.altitudeGainDbPerM = cfg.Real("pathloss.g_h_db_per_m");
    c.altitudeGainCapDb = cfg.Real("pathloss.g_h_cap_db");
    c.shadowingSigmaDb = cfg.Real("shadowing.sigma_db");
    c.noiseFigureDb = cfg.Real("radio.noise_figure_db");
    c.perSoftnessDb = cfg.Real("radio.per_softness_db");
    return c;
}

RunOutput
RunScenario(const ScenarioConfig& cfg, uint64_t seed, const std::string& runId, const RunHooks& hooks)
{
    Simulator sim(seed);
    const std::string& tech = cfg.Text("technology");
    const Vec3 bs{0, 0, cfg.Real("bs.height_m")};
    const UavMobility uav = MobilityFromConfig(cfg);
    const int nGround = static_cast<int>(cfg.Int("ground.n_nodes"));
    const GroundLayout ground = PlaceGroundNodes(nGround,
                                                 cfg.Real("ground.radius_m"),
                                                 {0, 0, cfg.Real("ground.height_m")},
                                                 sim.Stream("ground.layout"));
    auto position = [&uav, &ground](int node, SimTime t) {
        return node == 0 ? uav.At(t).p : ground.nodes.at(static_cast<size_t>(node - 1));
    };

    const ChannelConfig chCfg = ChannelFromConfig(cfg);
    const uint64_t shadowSeed = Mix64(seed ^ HashLabel("shadowing"));
    std::unique_ptr<UrbanChannel> channel;
    std::unique_ptr<AccessNetwork> net;
    if (tech == "wifi")
    {
        channel = std::make_unique<UrbanChannel>(chCfg, cfg.Real("wifi.frequency_ghz") * 1e9, 20e6, shadowSeed);
        RadioLinks links{channel.get(),
                         bs,
                         position,
                         &WifiMcsTable(),
                         cfg.Real("wifi.tx_power_dbm"),
                         cfg.Real("wifi.tx_power_dbm")};
        DcfParams dcf;
        dcf.retryLimit = static_cast<int>(cfg.Int("wifi.retry_limit"));
        dcf.queueFrames = static_cast<int>(cfg.Int("wifi.queue_frames"));
        auto wifi = std::make_unique<WifiNetwork>(sim, dcf, links, nGround + 1);
        if (hooks.onWifiTx)
        {
            wifi->SetTxObserver(hooks.onWifiTx);
        }
        net = std::move(wifi);
    }
    else if (tech == "lte")
    {
        const double bw = std::stod(cfg.Text("lte.bandwidth_mhz")) * 1e6;
        channel = std::make_unique<UrbanChannel>(chCfg, cfg.Real("lte.frequency_ghz") * 1e9, bw, shadowSeed);
        RadioLinks links{channel.get(),
                         bs,
                         position,
                         &LteCqiTable(),
                         cfg.Real("lte.ue_tx_power_dbm"),
                         cfg.Real("lte.enb_tx_power_dbm")};
        LteParams lp;
        lp.nPrb = static_cast<int>(cfg.Int("lte.n_prb"));
        lp.overhead = cfg.Real("lte.overhead");
        lp.srPeriodMs = static_cast<int>(cfg.Int("lte.sr_period_ms"));
        lp.maxRetx = static_cast<int>(cfg.Int("lte.max_retx"));
        lp.rlcRetxDelay = SimTime::Millis(cfg.Int("lte.rlc_retx_ms"));
        lp.rlcBufferBytes = cfg.Int("lte.rlc_buffer_bytes");
        lp.cqiPeriodMs = static_cast<int>(cfg.Int("lte.cqi_period_ms"));
        lp.ulMaxCqi = static_cast<int>(cfg.Int("lte.ul_max_cqi"));
        auto lte = std::make_unique<LteNetwork>(sim, lp, links, links, nGround + 1);
        if (hooks.onTti)
        {
            lte->SetTtiObserver(hooks.onTti);
        }
        net = std::move(lte);
    }
    else
    {
        StubParams sp;
        sp.delay = SimTime::Seconds(cfg.Real("stub.delay_ms") * 1e-3);
        sp.lossProb = cfg.Real("stub.loss");
        sp.jitter = SimTime::Seconds(cfg.Real("stub.jitter_ms") * 1e-3);
        net = std::make_unique<StubNetwork>(sim, sp);
    }

    PhiCollector phi;
    Estimator estimator(cfg.Text("telemetry.estimator") == "cv" ? EstimatorMode::ConstantVelocity
                                                                 : EstimatorMode::ZeroOrderHold);
    UavApplications apps(sim, cfg, *net, uav, phi, estimator);
    ErrorSampler sampler(sim,
                         SimTime::Millis(cfg.Int("telemetry.sample_ms")),
                         uav,
                         estimator,
                         cfg.Text("telemetry.error_norm") == "2d");
    if (cfg.Text("app") != "task")
    {
        sampler.Start();
    }

    PacketTally exogenous;
    std::vector<std::unique_ptr<ExogenousSource>> sources;
    const auto exoBytes = static_cast<uint32_t>(cfg.Int("exogenous.packet_bytes"));
    for (int i = 1; i <= nGround; ++i)
    {
        sources.push_back(std::make_unique<ExogenousSource>(
            sim,
            i,
            cfg.Real("exogenous.rate_mbps") * 1e6,
            exoBytes,
            sim.Stream(fmt::format("exogenous.phase.{}", i)),
            [&net, &exogenous](int node, uint32_t bytes) {
                exogenous.Emitted();
                Packet p;
                p.node = node;
                p.bytes = bytes + kUdpHeaderBytes;
                p.onDelivered = [&exogenous] { exogenous.Delivered(); };
                p.onDropped = [&exogenous](DropLayer l) { exogenous.Dropped(l); };
                net->Send(Direction::Uplink, std::move(p));
            }));
        sources.back()->Start();
    }

    sim.RunUntil(SimTime::Seconds(cfg.Real("horizon_s")));

    RunOutput out;
    out.runId = runId;
    out.seed = seed;
    out.records = phi.Finalize();
    for (const PhiRecord& r : out.records)
    {
        CheckPhiRecord(r);
    }
    out.errors = sampler.Take();
    const PacketCounts uavCounts = phi.Counts();
    const PacketCounts exoCounts = exogenous.Counts();
    if (!uavCounts.Conserved() || !exoCounts.Conserved())
    {
        throw AccountingError("packet conservation violated");
    }
    out.summary = Summarize(out.records, out.errors, uavCounts, exoCounts, seed);
    return out;
}

std::string
PacketsCsv(const RunOutput& run)
{
    std::string s = "run_id,burst_id,kind,seq,tau_us,emit_us,deliver_us,omega,layer_dropped\n";
    for (const PhiRecord& r : run.records)
    {
        for (size_t n = 0; n < r.t.size(); ++n)
        {
            s += fmt::format("{},{},{},{},{},{},{},{},{}\n",
                             run.runId,
                             r.burstId,
                             ToString(r.kind),
                             n,
                             r.tau.Us(),
                             TimeField(r.emit[n]),
                             TimeField(r.t[n]),
                             r.omega[n],
                             r.layer[n]);
        }
    }
    return s;
}

std::string
BurstsCsv(const RunOutput& run)
{
    std::string s = "run_id,burst_id,kind,size_bytes,n_packets,tau_us,delta_us,complete\n";
    for (const PhiRecord& r : run.records)
    {
        s += fmt::format("{},{},{},{},{},{},{},{}\n",
                         run.runId,
                         r.burstId,
                         ToString(r.kind),
                         r.sizeBytes,
                         r.t.size(),
                         r.tau.Us(),
                         TimeField(r.delta),
                         r.delta ? 1 : 0);
    }
    return s;
}

std::string
ErrorCsv(const RunOutput& run)
{
    std::string s = "run_id,t_us,true_x,true_y,true_z,est_x,est_y,est_z,err_m\n";
    for (const ErrorSample& e : run.errors)
    {
        s += fmt::format("{},{},{},{},{},{},{},{},{}\n",
                         run.runId,
                         e.t.Us(),
                         e.truth.x,
                         e.truth.y,
                         e.truth.z,
                         e.estimate.x,
                         e.estimate.y,
                         e.estimate.z,
                         e.error);
    }
    return s;
}

void
WriteFileAtomic(const std::string& path, const std::string& content)
{
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
        {
            throw std::runtime_error(fmt::format("cannot write {}", tmp));
        }
        out << content;
        if (!out)
        {
            throw std::runtime_error(fmt::format("write failed: {}", tmp));
        }
    }
    std::filesystem::rename(tmp, path);
}

void
WriteRunCsvs(const std::string& dir, const RunOutput& run)
{
    std::filesystem::create_directories(dir);
    WriteFileAtomic(dir + "/packets.csv", PacketsCsv(run));
    WriteFileAtomic(dir + "/bursts.csv", BurstsCsv(run));
    WriteFileAtomic(dir + "/error.csv", ErrorCsv(run));
}

} // namespace uavsim
