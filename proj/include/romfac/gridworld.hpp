#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "romfac/tensor.hpp"

namespace romfac::gridworld {

enum class Scenario { battle, pursuit };

Scenario scenario_from_name(const std::string& name);
std::string scenario_name(Scenario s);

// Per-event scalar rewards. Battle uses the first five, pursuit the last
// two. Defaults follow the MAgent-style settings the scenarios are
// modeled on.
struct RewardTable {
    double step = 0.005;
    double attack_hit = 0.2;
    double kill = 5.0;
    double attack_empty = -0.1;
    double be_attacked = -0.1;
    double predator_attack = 1.0;
    double prey_attacked = -0.1;
};

struct EnvConfig {
    Scenario scenario = Scenario::battle;
    int width = 8;
    int height = 8;
    int team_a_size = 4;   // battle team A / pursuit predators
    int team_b_size = 4;   // battle team B / pursuit prey
    int view_radius = 2;
    int max_steps = 100;
    int max_hp = 10;
    int hit_damage = 2;
    RewardTable rewards;
    std::uint64_t seed = 0;

    void validate() const;  // throws std::invalid_argument
};

// Actions: 4 moves, 4 attacks, no-op. Fixed per scenario.
enum : int {
    act_move_n = 0, act_move_s = 1, act_move_w = 2, act_move_e = 3,
    act_attack_n = 4, act_attack_s = 5, act_attack_w = 6, act_attack_e = 7,
    act_noop = 8,
    action_count = 9
};
bool is_move_action(int a);
bool is_attack_action(int a);
// dx/dy offsets for the 4 directions shared by moves and attacks
int action_dx(int a);
int action_dy(int a);

struct Agent {
    int id = 0;
    int team = 0;  // 0 = A/predators, 1 = B/prey
    int x = 0;
    int y = 0;
    int hp = 0;
    bool alive = true;
};

enum class EventKind { step, attack_hit, kill, attack_empty, be_attacked, predator_attack, prey_attacked };
const char* event_name(EventKind k);

struct Event {
    int step = 0;
    int agent = 0;
    EventKind kind = EventKind::step;
    double reward = 0.0;
};

struct WorldState {
    EnvConfig config;
    std::vector<Agent> agents;
    int step_count = 0;
    std::mt19937_64 rng;
    std::vector<Event> last_events;  // events emitted by the most recent step

    const Agent& agent(int id) const { return agents.at(static_cast<std::size_t>(id)); }
    int living_count(int team) const;
    std::optional<int> occupant(int x, int y) const;  // living agent at cell
};

enum class Outcome { ongoing, team_a_win, team_b_win, draw, not_applicable };
const char* outcome_name(Outcome o);

using Observation = diffcore::Tensor;

int observation_size(const EnvConfig& config);

WorldState reset(const EnvConfig& config);

// Dense feature vector, every entry in [0,1]: ally / enemy / hp channels
// over the view window, then own x, y, hp. Throws std::invalid_argument
// for a dead or unknown agent.
Observation observe(const WorldState& state, int agent_id);

// One action per living agent, indexed by agent id (entries for dead
// agents are ignored). Moves resolve first in ascending agent id with
// blocked moves cancelled, then attacks resolve against post-move
// positions in ascending attacker id. Returns per-agent rewards.
std::vector<double> step(WorldState& state, const std::vector<int>& joint_action);

// Living teammates within Chebyshev distance view_radius, self excluded.
std::vector<int> neighbors(const WorldState& state, int agent_id);

Outcome episode_outcome(const WorldState& state);

void write_event_log(std::ostream& out, const std::vector<Event>& events);

// Dynamic state only (roster, step counter, random stream); the config
// is supplied again at load time.
void save_world(std::ostream& out, const WorldState& state);
WorldState load_world(std::istream& in, const EnvConfig& config);

}  // namespace romfac::gridworld
