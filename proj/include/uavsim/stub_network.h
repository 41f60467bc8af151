#pragma once

#include "uavsim/network.h"
#include "uavsim/simulator.h"

namespace uavsim {

struct StubParams
{
    SimTime delay;
    double lossProb{0};
    SimTime jitter;  ///< half-width of a uniform perturbation of the delay
};

/// Idealized access network: fixed delay, independent losses, infinite
/// capacity. Losses are reported as DropLayer::Channel.
class StubNetwork : public AccessNetwork
{
  public:
    /// Throws std::invalid_argument on negative delay/jitter or a loss
    /// probability outside [0, 1].
    StubNetwork(Simulator& sim, StubParams params);

    void Send(Direction dir, Packet packet) override;

  private:
    Simulator& m_sim;
    StubParams m_params;
    TargetId m_target;
    RngStream* m_rng;
};

} // namespace uavsim
