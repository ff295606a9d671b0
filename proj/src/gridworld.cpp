#include "romfac/gridworld.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace romfac::gridworld {

Scenario scenario_from_name(const std::string& name) {
    if (name == "battle") return Scenario::battle;
    if (name == "pursuit") return Scenario::pursuit;
    throw std::invalid_argument("unknown scenario: " + name);
}

std::string scenario_name(Scenario s) {
    return s == Scenario::battle ? "battle" : "pursuit";
}

const char* event_name(EventKind k) {
    switch (k) {
        case EventKind::step: return "step";
        case EventKind::attack_hit: return "attack_hit";
        case EventKind::kill: return "kill";
        case EventKind::attack_empty: return "attack_empty";
        case EventKind::be_attacked: return "be_attacked";
        case EventKind::predator_attack: return "predator_attack";
        case EventKind::prey_attacked: return "prey_attacked";
    }
    return "?";
}

const char* outcome_name(Outcome o) {
    switch (o) {
        case Outcome::ongoing: return "ongoing";
        case Outcome::team_a_win: return "team_a_win";
        case Outcome::team_b_win: return "team_b_win";
        case Outcome::draw: return "draw";
        case Outcome::not_applicable: return "not_applicable";
    }
    return "?";
}

bool is_move_action(int a) { return a >= act_move_n && a <= act_move_e; }
bool is_attack_action(int a) { return a >= act_attack_n && a <= act_attack_e; }

int action_dx(int a) {
    switch (a) {
        case act_move_w: case act_attack_w: return -1;
        case act_move_e: case act_attack_e: return 1;
        default: return 0;
    }
}

int action_dy(int a) {
    switch (a) {
        case act_move_n: case act_attack_n: return -1;
        case act_move_s: case act_attack_s: return 1;
        default: return 0;
    }
}

void EnvConfig::validate() const {
    if (width <= 0 || height <= 0) throw std::invalid_argument("grid dimensions must be positive");
    if (team_a_size <= 0 || team_b_size <= 0)
        throw std::invalid_argument("team sizes must be positive");
    if (view_radius < 1) throw std::invalid_argument("view radius must be at least 1");
    if (max_steps <= 0) throw std::invalid_argument("max steps must be positive");
    if (max_hp <= 0 || hit_damage <= 0)
        throw std::invalid_argument("hp and hit damage must be positive");
    const double reward_values[] = {rewards.step,        rewards.attack_hit, rewards.kill,
                                    rewards.attack_empty, rewards.be_attacked,
                                    rewards.predator_attack, rewards.prey_attacked};
    for (double v : reward_values)
        if (!std::isfinite(v)) throw std::invalid_argument("reward table values must be finite");
    if (scenario == Scenario::battle) {
        const int half_cells = (width / 2) * height;
        if (team_a_size > half_cells || team_b_size > half_cells)
            throw std::invalid_argument("teams do not fit on their grid halves");
    } else {
        if (team_a_size + team_b_size > width * height)
            throw std::invalid_argument("agents do not fit on the grid");
    }
}

int WorldState::living_count(int team) const {
    int n = 0;
    for (const Agent& a : agents)
        if (a.alive && a.team == team) ++n;
    return n;
}

std::optional<int> WorldState::occupant(int x, int y) const {
    for (const Agent& a : agents)
        if (a.alive && a.x == x && a.y == y) return a.id;
    return std::nullopt;
}

namespace {

// Distinct seeded cells within [0,x_limit) x [0,height).
std::vector<std::pair<int, int>> sample_cells(std::mt19937_64& rng, int count, int x_limit,
                                              int height, std::vector<bool>& taken, int width) {
    std::vector<std::pair<int, int>> cells;
    std::uniform_int_distribution<int> dx(0, x_limit - 1);
    std::uniform_int_distribution<int> dy(0, height - 1);
    int guard = 0;
    while (static_cast<int>(cells.size()) < count) {
        if (++guard > 100000) throw std::invalid_argument("agent placement failed; grid too crowded");
        const int x = dx(rng);
        const int y = dy(rng);
        if (taken[static_cast<std::size_t>(y * width + x)]) continue;
        taken[static_cast<std::size_t>(y * width + x)] = true;
        cells.emplace_back(x, y);
    }
    return cells;
}

}  // namespace

WorldState reset(const EnvConfig& config) {
    config.validate();
    WorldState state;
    state.config = config;
    state.rng.seed(config.seed);
    std::vector<bool> taken(static_cast<std::size_t>(config.width * config.height), false);

    if (config.scenario == Scenario::battle) {
        if (config.width < 2) throw std::invalid_argument("battle grid needs width >= 2");
        // team A seeded on the left half, team B mirrored across the
        // vertical axis
        auto left = sample_cells(state.rng, config.team_a_size, config.width / 2, config.height,
                                 taken, config.width);
        int id = 0;
        for (auto [x, y] : left)
            state.agents.push_back({id++, 0, x, y, config.max_hp, true});
        for (auto [x, y] : left)
            state.agents.push_back({id++, 1, config.width - 1 - x, y, config.max_hp, true});
        if (config.team_b_size != config.team_a_size) {
            // unequal teams: B is freshly sampled on the right half instead
            // of mirrored (the halves are disjoint, so no clash with A)
            state.agents.resize(static_cast<std::size_t>(config.team_a_size));
            id = config.team_a_size;
            std::vector<bool> taken_b(static_cast<std::size_t>(config.width * config.height),
                                      false);
            auto right = sample_cells(state.rng, config.team_b_size, config.width / 2,
                                      config.height, taken_b, config.width);
            for (auto [x, y] : right)
                state.agents.push_back(
                    {id++, 1, config.width - 1 - x, y, config.max_hp, true});
        }
    } else {
        auto cells = sample_cells(state.rng, config.team_a_size + config.team_b_size, config.width,
                                  config.height, taken, config.width);
        int id = 0;
        for (int i = 0; i < config.team_a_size; ++i)
            state.agents.push_back({id, 0, cells[static_cast<std::size_t>(id)].first,
                                    cells[static_cast<std::size_t>(id)].second, config.max_hp, true}),
                ++id;
        for (int i = 0; i < config.team_b_size; ++i)
            state.agents.push_back({id, 1, cells[static_cast<std::size_t>(id)].first,
                                    cells[static_cast<std::size_t>(id)].second, config.max_hp, true}),
                ++id;
    }
    return state;
}

int observation_size(const EnvConfig& config) {
    const int window = 2 * config.view_radius + 1;
    return 3 * window * window + 3;
}

Observation observe(const WorldState& state, int agent_id) {
    if (agent_id < 0 || agent_id >= static_cast<int>(state.agents.size()))
        throw std::invalid_argument("observe: unknown agent " + std::to_string(agent_id));
    const Agent& self = state.agent(agent_id);
    if (!self.alive) throw std::invalid_argument("observe: agent " + std::to_string(agent_id) + " is dead");

    const EnvConfig& cfg = state.config;
    const int r = cfg.view_radius;
    const int window = 2 * r + 1;
    const int cells = window * window;
    Observation obs = diffcore::Tensor::zeros({3 * cells + 3});

    for (const Agent& other : state.agents) {
        if (!other.alive || other.id == agent_id) continue;
        const int dx = other.x - self.x;
        const int dy = other.y - self.y;
        if (std::abs(dx) > r || std::abs(dy) > r) continue;
        const int cell = (dy + r) * window + (dx + r);
        if (other.team == self.team)
            obs[cell] = 1.0;
        else
            obs[cells + cell] = 1.0;
        obs[2 * cells + cell] = static_cast<double>(other.hp) / cfg.max_hp;
    }
    obs[3 * cells + 0] = cfg.width > 1 ? static_cast<double>(self.x) / (cfg.width - 1) : 0.0;
    obs[3 * cells + 1] = cfg.height > 1 ? static_cast<double>(self.y) / (cfg.height - 1) : 0.0;
    obs[3 * cells + 2] = static_cast<double>(self.hp) / cfg.max_hp;
    return obs;
}

std::vector<int> neighbors(const WorldState& state, int agent_id) {
    if (agent_id < 0 || agent_id >= static_cast<int>(state.agents.size()))
        throw std::invalid_argument("neighbors: unknown agent " + std::to_string(agent_id));
    const Agent& self = state.agent(agent_id);
    if (!self.alive) throw std::invalid_argument("neighbors: agent is dead");
    std::vector<int> out;
    for (const Agent& other : state.agents) {
        if (!other.alive || other.id == agent_id || other.team != self.team) continue;
        const int dist = std::max(std::abs(other.x - self.x), std::abs(other.y - self.y));
        if (dist <= state.config.view_radius) out.push_back(other.id);
    }
    return out;
}

std::vector<double> step(WorldState& state, const std::vector<int>& joint_action) {
    const EnvConfig& cfg = state.config;
    const int n = static_cast<int>(state.agents.size());
    if (static_cast<int>(joint_action.size()) != n)
        throw std::invalid_argument("step: need one action slot per agent");

    state.last_events.clear();
    std::vector<double> rewards(static_cast<std::size_t>(n), 0.0);
    const int tick = state.step_count;

    auto emit = [&](int agent, EventKind kind, double reward) {
        state.last_events.push_back({tick, agent, kind, reward});
        rewards[static_cast<std::size_t>(agent)] += reward;
    };

    // per-step reward for everyone who acts (battle only)
    if (cfg.scenario == Scenario::battle) {
        for (const Agent& a : state.agents)
            if (a.alive) emit(a.id, EventKind::step, cfg.rewards.step);
    }

    // movement, ascending agent id; a move into a currently occupied or
    // off-grid cell cancels
    for (Agent& a : state.agents) {
        if (!a.alive) continue;
        const int action = joint_action[static_cast<std::size_t>(a.id)];
        if (!is_move_action(action)) continue;
        const int nx = a.x + action_dx(action);
        const int ny = a.y + action_dy(action);
        if (nx < 0 || nx >= cfg.width || ny < 0 || ny >= cfg.height) continue;
        if (state.occupant(nx, ny)) continue;
        a.x = nx;
        a.y = ny;
    }

    // attacks against post-move positions, ascending attacker id; deaths
    // apply immediately but bodies still absorb later hits this step
    std::vector<std::optional<int>> snapshot(
        static_cast<std::size_t>(cfg.width * cfg.height), std::nullopt);
    for (const Agent& a : state.agents)
        if (a.alive) snapshot[static_cast<std::size_t>(a.y * cfg.width + a.x)] = a.id;

    for (int attacker_id = 0; attacker_id < n; ++attacker_id) {
        const Agent& self = state.agent(attacker_id);
        if (!self.alive) continue;  // dead at start, or killed earlier this step
        const int action = joint_action[static_cast<std::size_t>(attacker_id)];
        if (!is_attack_action(action)) continue;
        const int tx = self.x + action_dx(action);
        const int ty = self.y + action_dy(action);

        std::optional<int> target;
        if (tx >= 0 && tx < cfg.width && ty >= 0 && ty < cfg.height)
            target = snapshot[static_cast<std::size_t>(ty * cfg.width + tx)];
        const bool enemy_there =
            target && state.agent(*target).team != self.team;

        if (cfg.scenario == Scenario::battle) {
            if (!enemy_there) {
                emit(self.id, EventKind::attack_empty, cfg.rewards.attack_empty);
                continue;
            }
            Agent& victim = state.agents[static_cast<std::size_t>(*target)];
            if (!victim.alive) {  // already killed this step
                emit(self.id, EventKind::attack_hit, cfg.rewards.attack_hit);
                continue;
            }
            emit(victim.id, EventKind::be_attacked, cfg.rewards.be_attacked);
            victim.hp -= cfg.hit_damage;
            if (victim.hp <= 0) {
                victim.alive = false;
                emit(self.id, EventKind::kill, cfg.rewards.kill);
            } else {
                emit(self.id, EventKind::attack_hit, cfg.rewards.attack_hit);
            }
        } else {
            // pursuit: only predator attacks on prey score; prey never die
            if (self.team == 0 && enemy_there) {
                emit(self.id, EventKind::predator_attack, cfg.rewards.predator_attack);
                emit(*target, EventKind::prey_attacked, cfg.rewards.prey_attacked);
            }
        }
    }

    state.step_count++;
    return rewards;
}

Outcome episode_outcome(const WorldState& state) {
    if (state.config.scenario != Scenario::battle) return Outcome::not_applicable;
    const int a = state.living_count(0);
    const int b = state.living_count(1);
    if (a == 0 && b == 0) return Outcome::draw;
    if (b == 0) return Outcome::team_a_win;
    if (a == 0) return Outcome::team_b_win;
    if (state.step_count >= state.config.max_steps) return Outcome::draw;
    return Outcome::ongoing;
}

void write_event_log(std::ostream& out, const std::vector<Event>& events) {
    for (const Event& e : events)
        out << e.step << ' ' << e.agent << ' ' << event_name(e.kind) << ' ' << e.reward << '\n';
}

void save_world(std::ostream& out, const WorldState& state) {
    out << "world 1\n";
    out << state.step_count << ' ' << state.agents.size() << '\n';
    for (const Agent& a : state.agents)
        out << a.id << ' ' << a.team << ' ' << a.x << ' ' << a.y << ' ' << a.hp << ' '
            << (a.alive ? 1 : 0) << '\n';
    out << state.rng << '\n';
}

WorldState load_world(std::istream& in, const EnvConfig& config) {
    std::string tag;
    int version = 0;
    in >> tag >> version;
    if (!in || tag != "world" || version != 1)
        throw std::runtime_error("world load: bad header");
    WorldState state;
    state.config = config;
    std::size_t count = 0;
    in >> state.step_count >> count;
    if (!in || count > 1000000) throw std::runtime_error("world load: bad agent count");
    state.agents.resize(count);
    for (Agent& a : state.agents) {
        int alive = 0;
        in >> a.id >> a.team >> a.x >> a.y >> a.hp >> alive;
        a.alive = alive != 0;
    }
    in >> state.rng;
    if (!in) throw std::runtime_error("world load: truncated");
    return state;
}

}  // namespace romfac::gridworld
