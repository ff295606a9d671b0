#include "romfac/env.hpp"

#include <stdexcept>

namespace romfac::trainer {

GridEnv::GridEnv(const gridworld::EnvConfig& config) : config_(config) {
    config_.validate();
    state_ = gridworld::reset(config_);
}

int GridEnv::agent_count() const {
    return config_.team_a_size + config_.team_b_size;
}

int GridEnv::team_of(int agent) const {
    if (agent < 0 || agent >= agent_count())
        throw std::invalid_argument("env: agent id out of range");
    return state_.agent(agent).team;
}

int GridEnv::observation_size() const {
    return gridworld::observation_size(config_);
}

void GridEnv::reset(std::uint64_t seed) {
    config_.seed = seed;
    state_ = gridworld::reset(config_);
}

bool GridEnv::agent_alive(int agent) const {
    if (agent < 0 || agent >= agent_count())
        throw std::invalid_argument("env: agent id out of range");
    return state_.agent(agent).alive;
}

Tensor GridEnv::observe(int agent) const {
    return gridworld::observe(state_, agent);
}

std::vector<int> GridEnv::neighbors(int agent) const {
    return gridworld::neighbors(state_, agent);
}

std::vector<double> GridEnv::step(const std::vector<int>& actions) {
    return gridworld::step(state_, actions);
}

bool GridEnv::episode_done() const {
    if (state_.step_count >= config_.max_steps) return true;
    const gridworld::Outcome oc = gridworld::episode_outcome(state_);
    return oc == gridworld::Outcome::team_a_win || oc == gridworld::Outcome::team_b_win ||
           oc == gridworld::Outcome::draw;
}

}  // namespace romfac::trainer
