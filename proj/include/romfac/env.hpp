#pragma once

#include <cstdint>
#include <vector>

#include "romfac/gridworld.hpp"
#include "romfac/tensor.hpp"

namespace romfac::trainer {

using diffcore::Tensor;

// Multi-agent episodic environment as seen by the training loop. Agents are
// numbered 0..agent_count-1 and grouped into teams; every agent of a team
// runs the same networks.
class Env {
public:
    virtual ~Env() = default;

    virtual int agent_count() const = 0;
    virtual int team_count() const = 0;
    virtual int team_of(int agent) const = 0;
    virtual int observation_size() const = 0;
    virtual int action_count() const = 0;

    // Start a fresh episode. All in-episode randomness derives from the seed,
    // so the same seed replays the same episode under the same policy.
    virtual void reset(std::uint64_t seed) = 0;

    virtual bool agent_alive(int agent) const = 0;
    // Only valid for living agents.
    virtual Tensor observe(int agent) const = 0;
    // Living teammates whose executed actions make up the agent's mean action.
    virtual std::vector<int> neighbors(int agent) const = 0;
    // Advance one tick. `actions` holds one entry per agent; entries for dead
    // agents are ignored. Returns the per-agent reward for the tick.
    virtual std::vector<double> step(const std::vector<int>& actions) = 0;
    virtual bool episode_done() const = 0;
};

// Env backed by the grid-world scenarios. Team 0 is side A (battle) or the
// predators (pursuit); team 1 is the other side.
class GridEnv final : public Env {
public:
    explicit GridEnv(const gridworld::EnvConfig& config);

    int agent_count() const override;
    int team_count() const override { return 2; }
    int team_of(int agent) const override;
    int observation_size() const override;
    int action_count() const override { return gridworld::action_count; }

    void reset(std::uint64_t seed) override;

    bool agent_alive(int agent) const override;
    Tensor observe(int agent) const override;
    std::vector<int> neighbors(int agent) const override;
    std::vector<double> step(const std::vector<int>& actions) override;
    bool episode_done() const override;

    const gridworld::WorldState& world() const { return state_; }

private:
    gridworld::EnvConfig config_;
    gridworld::WorldState state_;
};

}  // namespace romfac::trainer
