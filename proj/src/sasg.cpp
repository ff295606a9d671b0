#include "romfac/sasg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace romfac::sasg {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("sasg: ") + what);
}

std::vector<int> views_under(const TabularSaSG& game, const Perturbation& v, int state) {
    std::vector<int> views(static_cast<std::size_t>(game.agent_count()), state);
    for (int j = 0; j < game.attacked_count; ++j)
        views[static_cast<std::size_t>(j)] =
            v.maps[static_cast<std::size_t>(j)][static_cast<std::size_t>(state)];
    return views;
}

// Unvalidated product over per-agent rows, agent 0 most significant.
std::vector<double> joint_dist_kernel(const TabularSaSG& game, const TabularPolicy& pi,
                                      const std::vector<int>& views) {
    const int n_agents = game.agent_count();
    const int n_joint = game.joint_action_count();
    std::vector<double> dist(static_cast<std::size_t>(n_joint), 0.0);
    for (int joint = 0; joint < n_joint; ++joint) {
        int rest = joint;
        double p = 1.0;
        for (int a = n_agents - 1; a >= 0; --a) {
            const int count = game.action_counts[static_cast<std::size_t>(a)];
            const int act = rest % count;
            rest /= count;
            p *= pi.rows[static_cast<std::size_t>(a)][static_cast<std::size_t>(
                views[static_cast<std::size_t>(a)])][static_cast<std::size_t>(act)];
        }
        dist[static_cast<std::size_t>(joint)] = p;
    }
    return dist;
}

struct InducedChain {
    std::vector<std::vector<double>> step;     // [state][next]: marginal transition matrix
    std::vector<std::vector<double>> rewards;  // [agent][state]: expected one-step reward
};

InducedChain induced_chain(const TabularSaSG& game, const TabularPolicy& pi,
                           const Perturbation& v) {
    const int n_states = game.state_count;
    const int n_agents = game.agent_count();
    const int n_joint = game.joint_action_count();
    InducedChain chain;
    chain.step.assign(static_cast<std::size_t>(n_states),
                      std::vector<double>(static_cast<std::size_t>(n_states), 0.0));
    chain.rewards.assign(static_cast<std::size_t>(n_agents),
                         std::vector<double>(static_cast<std::size_t>(n_states), 0.0));
    for (int s = 0; s < n_states; ++s) {
        const auto dist = joint_dist_kernel(game, pi, views_under(game, v, s));
        for (int joint = 0; joint < n_joint; ++joint) {
            const double w = dist[static_cast<std::size_t>(joint)];
            if (w == 0.0) continue;
            const auto& row =
                game.transition[static_cast<std::size_t>(s)][static_cast<std::size_t>(joint)];
            for (int s2 = 0; s2 < n_states; ++s2) {
                const double pr = row[static_cast<std::size_t>(s2)];
                if (pr == 0.0) continue;
                chain.step[static_cast<std::size_t>(s)][static_cast<std::size_t>(s2)] += w * pr;
                for (int j = 0; j < n_agents; ++j)
                    chain.rewards[static_cast<std::size_t>(j)][static_cast<std::size_t>(s)] +=
                        w * pr *
                        game.reward[static_cast<std::size_t>(j)][static_cast<std::size_t>(s)]
                                   [static_cast<std::size_t>(joint)][static_cast<std::size_t>(s2)];
            }
        }
    }
    return chain;
}

// Gauss-Jordan solve of (I - gamma*step) X = rewards^T, one column per agent.
std::vector<std::vector<double>> solve_discounted(const InducedChain& chain, double gamma) {
    const int n = static_cast<int>(chain.step.size());
    const int m = static_cast<int>(chain.rewards.size());
    std::vector<std::vector<double>> aug(
        static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n + m), 0.0));
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < n; ++k)
            aug[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] =
                (i == k ? 1.0 : 0.0) -
                gamma * chain.step[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
        for (int j = 0; j < m; ++j)
            aug[static_cast<std::size_t>(i)][static_cast<std::size_t>(n + j)] =
                chain.rewards[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
    }
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int row = col + 1; row < n; ++row)
            if (std::abs(aug[static_cast<std::size_t>(row)][static_cast<std::size_t>(col)]) >
                std::abs(aug[static_cast<std::size_t>(pivot)][static_cast<std::size_t>(col)]))
                pivot = row;
        if (std::abs(aug[static_cast<std::size_t>(pivot)][static_cast<std::size_t>(col)]) < 1e-300)
            throw std::domain_error("sasg: singular value system");
        std::swap(aug[static_cast<std::size_t>(col)], aug[static_cast<std::size_t>(pivot)]);
        const double inv = 1.0 / aug[static_cast<std::size_t>(col)][static_cast<std::size_t>(col)];
        for (int k = col; k < n + m; ++k)
            aug[static_cast<std::size_t>(col)][static_cast<std::size_t>(k)] *= inv;
        for (int row = 0; row < n; ++row) {
            if (row == col) continue;
            const double factor =
                aug[static_cast<std::size_t>(row)][static_cast<std::size_t>(col)];
            if (factor == 0.0) continue;
            for (int k = col; k < n + m; ++k)
                aug[static_cast<std::size_t>(row)][static_cast<std::size_t>(k)] -=
                    factor * aug[static_cast<std::size_t>(col)][static_cast<std::size_t>(k)];
        }
    }
    std::vector<std::vector<double>> values(
        static_cast<std::size_t>(m), std::vector<double>(static_cast<std::size_t>(n), 0.0));
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < n; ++i)
            values[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] =
                aug[static_cast<std::size_t>(i)][static_cast<std::size_t>(n + j)];
    return values;
}

// Iterates the induced chain to its fixed point and insists the direct solve
// agrees. The tolerance is absolute up to value scale 100 and relative past
// it, so well-conditioned desk-scale games are held to 1e-10.
void cross_check_values(const InducedChain& chain, double gamma,
                        const std::vector<std::vector<double>>& solution) {
    const int n = static_cast<int>(chain.step.size());
    const int m = static_cast<int>(chain.rewards.size());
    double reward_scale = 0.0;
    for (const auto& row : chain.rewards)
        for (double r : row) reward_scale = std::max(reward_scale, std::abs(r));
    const double value_bound = std::max(1.0, reward_scale / (1.0 - gamma));
    const double tol = 1e-10 * std::max(1.0, value_bound / 100.0);
    const double target = tol / 4.0;
    long long max_steps = 1;
    if (gamma > 0.0) {
        const double raw = std::ceil(std::log(target / value_bound) / std::log(gamma));
        max_steps = raw < 1.0 ? 1 : (raw > 1e6 ? 1'000'000 : static_cast<long long>(raw));
    }
    std::vector<std::vector<double>> current(
        static_cast<std::size_t>(m), std::vector<double>(static_cast<std::size_t>(n), 0.0));
    std::vector<std::vector<double>> next = current;
    for (long long step = 0; step < max_steps; ++step) {
        double delta = 0.0;
        for (int j = 0; j < m; ++j) {
            for (int s = 0; s < n; ++s) {
                double acc = chain.rewards[static_cast<std::size_t>(j)][static_cast<std::size_t>(s)];
                for (int s2 = 0; s2 < n; ++s2)
                    acc += gamma *
                           chain.step[static_cast<std::size_t>(s)][static_cast<std::size_t>(s2)] *
                           current[static_cast<std::size_t>(j)][static_cast<std::size_t>(s2)];
                next[static_cast<std::size_t>(j)][static_cast<std::size_t>(s)] = acc;
                delta = std::max(
                    delta, std::abs(acc - current[static_cast<std::size_t>(j)]
                                              [static_cast<std::size_t>(s)]));
            }
        }
        current.swap(next);
        if (delta <= (1.0 - gamma) * target) break;
    }
    for (int j = 0; j < m; ++j)
        for (int s = 0; s < n; ++s)
            if (std::abs(current[static_cast<std::size_t>(j)][static_cast<std::size_t>(s)] -
                         solution[static_cast<std::size_t>(j)][static_cast<std::size_t>(s)]) > tol)
                throw std::domain_error("sasg: linear solve and value iteration disagree");
}

ValueVector policy_value_kernel(const TabularSaSG& game, const TabularPolicy& pi,
                                const Perturbation& v) {
    const InducedChain chain = induced_chain(game, pi, v);
    ValueVector out;
    out.values = solve_discounted(chain, game.gamma);
    cross_check_values(chain, game.gamma, out.values);
    return out;
}

BellmanResult bellman_kernel(const TabularSaSG& game, const TabularPolicy& pi, int agent,
                             const Perturbation& others, const std::vector<double>& current) {
    const int n_states = game.state_count;
    const int n_joint = game.joint_action_count();
    BellmanResult out;
    out.values.assign(static_cast<std::size_t>(n_states), 0.0);
    out.chosen_view.assign(static_cast<std::size_t>(n_states), 0);
    for (int s = 0; s < n_states; ++s) {
        std::vector<int> views = views_under(game, others, s);
        double best = std::numeric_limits<double>::infinity();
        int best_view = -1;
        for (int view :
             game.admissible[static_cast<std::size_t>(agent)][static_cast<std::size_t>(s)]) {
            views[static_cast<std::size_t>(agent)] = view;
            const auto dist = joint_dist_kernel(game, pi, views);
            double total = 0.0;
            for (int joint = 0; joint < n_joint; ++joint) {
                const double w = dist[static_cast<std::size_t>(joint)];
                if (w == 0.0) continue;
                const auto& row =
                    game.transition[static_cast<std::size_t>(s)][static_cast<std::size_t>(joint)];
                const auto& rew = game.reward[static_cast<std::size_t>(agent)]
                                             [static_cast<std::size_t>(s)]
                                             [static_cast<std::size_t>(joint)];
                double q = 0.0;
                for (int s2 = 0; s2 < n_states; ++s2) {
                    const double pr = row[static_cast<std::size_t>(s2)];
                    if (pr == 0.0) continue;
                    q += pr * (rew[static_cast<std::size_t>(s2)] +
                               game.gamma * current[static_cast<std::size_t>(s2)]);
                }
                total += w * q;
            }
            if (total < best) {
                best = total;
                best_view = view;
            }
        }
        out.values[static_cast<std::size_t>(s)] = best;
        out.chosen_view[static_cast<std::size_t>(s)] = best_view;
    }
    return out;
}

AdversaryResult optimal_adversary_kernel(const TabularSaSG& game, const TabularPolicy& pi,
                                         int agent, const Perturbation& others) {
    std::vector<double> current(static_cast<std::size_t>(game.state_count), 0.0);
    for (long long step = 0; step < 1'000'000; ++step) {
        BellmanResult next = bellman_kernel(game, pi, agent, others, current);
        double delta = 0.0;
        for (std::size_t s = 0; s < current.size(); ++s)
            delta = std::max(delta, std::abs(next.values[s] - current[s]));
        current = std::move(next.values);
        // Past 100k sweeps the residual can only be rounding noise; accept it
        // rather than spin on the last ulp.
        if (delta < 1e-12 || (step > 100'000 && delta < 1e-9))
            return {std::move(next.chosen_view), std::move(current)};
    }
    throw std::domain_error("sasg: adversary iteration failed to converge");
}

}  // namespace

int TabularSaSG::joint_action_count() const {
    long long product = 1;
    for (int n : action_counts) {
        require(n >= 1, "every agent needs at least one action");
        product *= n;
        require(product <= 10'000'000, "joint action space too large");
    }
    return static_cast<int>(product);
}

int TabularSaSG::encode_joint(const std::vector<int>& actions) const {
    require(static_cast<int>(actions.size()) == agent_count(),
            "encode_joint: one action per agent");
    int joint = 0;
    for (int a = 0; a < agent_count(); ++a) {
        const int count = action_counts[static_cast<std::size_t>(a)];
        const int act = actions[static_cast<std::size_t>(a)];
        require(act >= 0 && act < count, "encode_joint: action out of range");
        joint = joint * count + act;
    }
    return joint;
}

std::vector<int> TabularSaSG::decode_joint(int joint) const {
    require(joint >= 0 && joint < joint_action_count(), "decode_joint: index out of range");
    std::vector<int> actions(static_cast<std::size_t>(agent_count()), 0);
    for (int a = agent_count() - 1; a >= 0; --a) {
        const int count = action_counts[static_cast<std::size_t>(a)];
        actions[static_cast<std::size_t>(a)] = joint % count;
        joint /= count;
    }
    return actions;
}

void TabularSaSG::validate() const {
    require(state_count >= 1, "state_count must be at least 1");
    require(!action_counts.empty(), "at least one agent");
    require(attacked_count >= 0 && attacked_count <= agent_count(),
            "attacked_count out of range");
    require(std::isfinite(gamma) && gamma >= 0.0 && gamma < 1.0, "gamma must lie in [0,1)");
    const int n_joint = joint_action_count();
    require(static_cast<int>(admissible.size()) == agent_count(),
            "admissible needs one table per agent");
    for (int a = 0; a < agent_count(); ++a) {
        const auto& table = admissible[static_cast<std::size_t>(a)];
        require(static_cast<int>(table.size()) == state_count,
                "admissible needs one view list per state");
        for (int s = 0; s < state_count; ++s) {
            const auto& views = table[static_cast<std::size_t>(s)];
            require(!views.empty(), "admissible view list must not be empty");
            bool has_self = false;
            int prev = -1;
            for (int view : views) {
                require(view >= 0 && view < state_count, "admissible view out of range");
                require(view > prev, "admissible views must be strictly increasing");
                prev = view;
                if (view == s) has_self = true;
            }
            require(has_self, "the true state must always be admissible");
        }
    }
    require(static_cast<int>(transition.size()) == state_count,
            "transition needs one block per state");
    for (int s = 0; s < state_count; ++s) {
        const auto& block = transition[static_cast<std::size_t>(s)];
        require(static_cast<int>(block.size()) == n_joint,
                "transition needs one row per joint action");
        for (const auto& row : block) {
            require(static_cast<int>(row.size()) == state_count,
                    "transition row needs one entry per state");
            double sum = 0.0;
            for (double p : row) {
                require(std::isfinite(p) && p >= 0.0, "transition probabilities must be >= 0");
                sum += p;
            }
            require(std::abs(sum - 1.0) <= 1e-12, "transition row must sum to 1");
        }
    }
    require(static_cast<int>(reward.size()) == agent_count(),
            "reward needs one tensor per agent");
    for (const auto& per_agent : reward) {
        require(static_cast<int>(per_agent.size()) == state_count,
                "reward needs one block per state");
        for (const auto& block : per_agent) {
            require(static_cast<int>(block.size()) == n_joint,
                    "reward needs one row per joint action");
            for (const auto& row : block) {
                require(static_cast<int>(row.size()) == state_count,
                        "reward row needs one entry per state");
                for (double r : row) require(std::isfinite(r), "rewards must be finite");
            }
        }
    }
}

void TabularPolicy::validate(const TabularSaSG& game) const {
    require(static_cast<int>(rows.size()) == game.agent_count(),
            "policy needs one table per agent");
    for (int a = 0; a < game.agent_count(); ++a) {
        const auto& table = rows[static_cast<std::size_t>(a)];
        require(static_cast<int>(table.size()) == game.state_count,
                "policy needs one row per state");
        for (const auto& row : table) {
            require(static_cast<int>(row.size()) ==
                        game.action_counts[static_cast<std::size_t>(a)],
                    "policy row needs one entry per action");
            double sum = 0.0;
            for (double p : row) {
                require(std::isfinite(p) && p >= 0.0, "policy probabilities must be >= 0");
                sum += p;
            }
            require(std::abs(sum - 1.0) <= 1e-9, "policy row must sum to 1");
        }
    }
}

Perturbation Perturbation::identity(const TabularSaSG& game) {
    Perturbation v;
    v.maps.assign(static_cast<std::size_t>(game.attacked_count),
                  std::vector<int>(static_cast<std::size_t>(game.state_count), 0));
    for (auto& map : v.maps)
        for (int s = 0; s < game.state_count; ++s) map[static_cast<std::size_t>(s)] = s;
    return v;
}

void Perturbation::validate(const TabularSaSG& game) const {
    require(static_cast<int>(maps.size()) == game.attacked_count,
            "perturbation needs one map per attacked agent");
    for (int j = 0; j < game.attacked_count; ++j) {
        const auto& map = maps[static_cast<std::size_t>(j)];
        require(static_cast<int>(map.size()) == game.state_count,
                "perturbation map needs one entry per state");
        for (int s = 0; s < game.state_count; ++s) {
            const auto& views =
                game.admissible[static_cast<std::size_t>(j)][static_cast<std::size_t>(s)];
            const int view = map[static_cast<std::size_t>(s)];
            require(std::find(views.begin(), views.end(), view) != views.end(),
                    "perturbation map leaves the admissible set");
        }
    }
}

std::vector<double> joint_policy_given_views(const TabularSaSG& game, const TabularPolicy& pi,
                                             const std::vector<int>& views) {
    game.validate();
    pi.validate(game);
    require(static_cast<int>(views.size()) == game.agent_count(),
            "joint_policy_given_views: one view per agent");
    for (int view : views)
        require(view >= 0 && view < game.state_count,
                "joint_policy_given_views: view out of range");
    return joint_dist_kernel(game, pi, views);
}

std::vector<double> joint_perturbed_policy(const TabularSaSG& game, const TabularPolicy& pi,
                                           const Perturbation& v, int state) {
    game.validate();
    pi.validate(game);
    v.validate(game);
    require(state >= 0 && state < game.state_count, "joint_perturbed_policy: state out of range");
    return joint_dist_kernel(game, pi, views_under(game, v, state));
}

ValueVector policy_value(const TabularSaSG& game, const TabularPolicy& pi,
                         const Perturbation& v) {
    game.validate();
    pi.validate(game);
    v.validate(game);
    return policy_value_kernel(game, pi, v);
}

double action_value(const TabularSaSG& game, const ValueVector& values, int agent, int state,
                    int joint_action) {
    game.validate();
    require(agent >= 0 && agent < game.agent_count(), "action_value: agent out of range");
    require(state >= 0 && state < game.state_count, "action_value: state out of range");
    require(joint_action >= 0 && joint_action < game.joint_action_count(),
            "action_value: joint action out of range");
    require(static_cast<int>(values.values.size()) == game.agent_count(),
            "action_value: values need one vector per agent");
    const auto& value_row = values.values[static_cast<std::size_t>(agent)];
    require(static_cast<int>(value_row.size()) == game.state_count,
            "action_value: values need one entry per state");
    const auto& row =
        game.transition[static_cast<std::size_t>(state)][static_cast<std::size_t>(joint_action)];
    const auto& rew = game.reward[static_cast<std::size_t>(agent)][static_cast<std::size_t>(state)]
                                 [static_cast<std::size_t>(joint_action)];
    double total = 0.0;
    for (int s2 = 0; s2 < game.state_count; ++s2) {
        const double pr = row[static_cast<std::size_t>(s2)];
        if (pr == 0.0) continue;
        total += pr * (rew[static_cast<std::size_t>(s2)] +
                       game.gamma * value_row[static_cast<std::size_t>(s2)]);
    }
    return total;
}

BellmanResult bellman_step(const TabularSaSG& game, const TabularPolicy& pi, int agent,
                           const Perturbation& others, const std::vector<double>& current) {
    game.validate();
    pi.validate(game);
    others.validate(game);
    require(agent >= 0 && agent < game.attacked_count, "bellman_step: agent must be attackable");
    require(static_cast<int>(current.size()) == game.state_count,
            "bellman_step: one value per state");
    for (double v : current) require(std::isfinite(v), "bellman_step: values must be finite");
    return bellman_kernel(game, pi, agent, others, current);
}

AdversaryResult optimal_adversary(const TabularSaSG& game, const TabularPolicy& pi, int agent,
                                  const Perturbation& others) {
    game.validate();
    pi.validate(game);
    others.validate(game);
    require(agent >= 0 && agent < game.attacked_count,
            "optimal_adversary: agent must be attackable");
    return optimal_adversary_kernel(game, pi, agent, others);
}

std::string joint_adversary_status_name(JointAdversaryStatus status) {
    switch (status) {
        case JointAdversaryStatus::converged: return "converged";
        case JointAdversaryStatus::exhaustive: return "exhaustive";
        case JointAdversaryStatus::undecided: return "undecided";
    }
    throw std::invalid_argument("sasg: unknown joint adversary status");
}

JointAdversaryResult joint_optimal_adversary(const TabularSaSG& game, const TabularPolicy& pi) {
    game.validate();
    pi.validate(game);
    Perturbation v = Perturbation::identity(game);
    if (game.attacked_count == 0) return {v, JointAdversaryStatus::converged};
    for (int sweep = 0; sweep < 64; ++sweep) {
        bool changed = false;
        for (int j = 0; j < game.attacked_count; ++j) {
            AdversaryResult best = optimal_adversary_kernel(game, pi, j, v);
            if (best.map != v.maps[static_cast<std::size_t>(j)]) {
                v.maps[static_cast<std::size_t>(j)] = std::move(best.map);
                changed = true;
            }
        }
        if (!changed) return {v, JointAdversaryStatus::converged};
    }

    // Best responses cycled: look for any jointly stable map by enumeration.
    long long space = 1;
    for (int j = 0; j < game.attacked_count; ++j) {
        for (int s = 0; s < game.state_count; ++s) {
            space *= static_cast<long long>(
                game.admissible[static_cast<std::size_t>(j)][static_cast<std::size_t>(s)].size());
            if (space > 1'000'000)
                return {Perturbation::identity(game), JointAdversaryStatus::undecided};
        }
    }
    Perturbation cand = Perturbation::identity(game);
    std::vector<std::size_t> digits(
        static_cast<std::size_t>(game.attacked_count * game.state_count), 0);
    for (long long index = 0; index < space; ++index) {
        for (int j = 0; j < game.attacked_count; ++j)
            for (int s = 0; s < game.state_count; ++s)
                cand.maps[static_cast<std::size_t>(j)][static_cast<std::size_t>(s)] =
                    game.admissible[static_cast<std::size_t>(j)][static_cast<std::size_t>(s)]
                                   [digits[static_cast<std::size_t>(j * game.state_count + s)]];
        const ValueVector vals = policy_value_kernel(game, pi, cand);
        bool stable = true;
        for (int j = 0; j < game.attacked_count && stable; ++j) {
            const AdversaryResult best = optimal_adversary_kernel(game, pi, j, cand);
            for (int s = 0; s < game.state_count; ++s) {
                if (vals.values[static_cast<std::size_t>(j)][static_cast<std::size_t>(s)] >
                    best.values[static_cast<std::size_t>(s)] + 1e-9) {
                    stable = false;
                    break;
                }
            }
        }
        if (stable) return {cand, JointAdversaryStatus::exhaustive};
        // advance the mixed-radix counter (agent-major, state-minor)
        for (int cell = game.attacked_count * game.state_count - 1; cell >= 0; --cell) {
            const int j = cell / game.state_count;
            const int s = cell % game.state_count;
            const std::size_t limit =
                game.admissible[static_cast<std::size_t>(j)][static_cast<std::size_t>(s)].size();
            if (++digits[static_cast<std::size_t>(cell)] < limit) break;
            digits[static_cast<std::size_t>(cell)] = 0;
        }
    }
    return {Perturbation::identity(game), JointAdversaryStatus::undecided};
}

double tv_distance(const std::vector<double>& p, const std::vector<double>& q) {
    require(p.size() == q.size() && !p.empty(),
            "tv_distance: distributions need equal non-empty support");
    double total = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) total += std::abs(p[i] - q[i]);
    return 0.5 * total;
}

CertificateReport value_drop_certificate(const TabularSaSG& game, const TabularPolicy& pi,
                                         int agent) {
    game.validate();
    pi.validate(game);
    require(agent >= 0 && agent < game.attacked_count,
            "value_drop_certificate: agent must be attackable");
    const JointAdversaryResult joint = joint_optimal_adversary(game, pi);
    if (joint.status == JointAdversaryStatus::undecided)
        throw std::domain_error("sasg: joint adversary undecided, cannot certify");
    Perturbation alone = joint.perturbation;  // agent left unattacked, others in place
    for (int s = 0; s < game.state_count; ++s)
        alone.maps[static_cast<std::size_t>(agent)][static_cast<std::size_t>(s)] = s;
    const ValueVector attacked = policy_value_kernel(game, pi, joint.perturbation);
    const ValueVector spared = policy_value_kernel(game, pi, alone);

    CertificateReport report;
    report.adversary_map = joint.perturbation.maps[static_cast<std::size_t>(agent)];
    report.lhs = -std::numeric_limits<double>::infinity();
    for (int s = 0; s < game.state_count; ++s)
        report.lhs = std::max(
            report.lhs,
            spared.values[static_cast<std::size_t>(agent)][static_cast<std::size_t>(s)] -
                attacked.values[static_cast<std::size_t>(agent)][static_cast<std::size_t>(s)]);

    double reward_scale = 0.0;
    for (const auto& block : game.reward[static_cast<std::size_t>(agent)])
        for (const auto& row : block)
            for (double r : row) reward_scale = std::max(reward_scale, std::abs(r));
    const double shrink = 1.0 - game.gamma;
    report.zeta = 2.0 * (1.0 + game.gamma / (shrink * shrink)) * reward_scale;

    report.worst_view.assign(static_cast<std::size_t>(game.state_count), 0);
    double worst_shift = 0.0;
    for (int s = 0; s < game.state_count; ++s) {
        std::vector<int> views = views_under(game, joint.perturbation, s);
        views[static_cast<std::size_t>(agent)] = s;
        const auto clean = joint_dist_kernel(game, pi, views);
        double best_here = -1.0;
        int best_view = s;
        for (int view :
             game.admissible[static_cast<std::size_t>(agent)][static_cast<std::size_t>(s)]) {
            views[static_cast<std::size_t>(agent)] = view;
            const double shift = tv_distance(clean, joint_dist_kernel(game, pi, views));
            if (shift > best_here) {
                best_here = shift;
                best_view = view;
            }
        }
        report.worst_view[static_cast<std::size_t>(s)] = best_view;
        worst_shift = std::max(worst_shift, best_here);
    }
    report.rhs = report.zeta * worst_shift;
    report.holds = report.lhs <= report.rhs + 1e-9;
    return report;
}

NashScanReport nash_existence_scan(const TabularSaSG& game) {
    game.validate();
    const int n_agents = game.agent_count();
    const int n_states = game.state_count;

    // per-agent count of deterministic maps, refusing oversized spaces
    std::vector<long long> map_counts(static_cast<std::size_t>(n_agents), 1);
    long long total = 1;
    for (int a = 0; a < n_agents; ++a) {
        for (int s = 0; s < n_states; ++s) {
            map_counts[static_cast<std::size_t>(a)] *=
                game.action_counts[static_cast<std::size_t>(a)];
            if (map_counts[static_cast<std::size_t>(a)] > 1'000'000 ||
                total * map_counts[static_cast<std::size_t>(a)] > 1'000'000) {
                double log10_size = 0.0;
                for (int b = 0; b < n_agents; ++b)
                    log10_size += n_states *
                                  std::log10(static_cast<double>(
                                      game.action_counts[static_cast<std::size_t>(b)]));
                char buf[160];
                std::snprintf(buf, sizeof buf,
                              "sasg: deterministic policy space ~10^%.1f exceeds the enumeration "
                              "bound of 1e6",
                              log10_size);
                throw std::invalid_argument(buf);
            }
        }
        total *= map_counts[static_cast<std::size_t>(a)];
    }
    std::vector<long long> strides(static_cast<std::size_t>(n_agents), 1);
    for (int a = n_agents - 2; a >= 0; --a)
        strides[static_cast<std::size_t>(a)] =
            strides[static_cast<std::size_t>(a + 1)] * map_counts[static_cast<std::size_t>(a + 1)];

    auto profile_actions = [&](long long profile) {
        std::vector<std::vector<int>> actions(
            static_cast<std::size_t>(n_agents),
            std::vector<int>(static_cast<std::size_t>(n_states), 0));
        for (int a = 0; a < n_agents; ++a) {
            long long map_index = (profile / strides[static_cast<std::size_t>(a)]) %
                                  map_counts[static_cast<std::size_t>(a)];
            for (int s = n_states - 1; s >= 0; --s) {
                const int count = game.action_counts[static_cast<std::size_t>(a)];
                actions[static_cast<std::size_t>(a)][static_cast<std::size_t>(s)] =
                    static_cast<int>(map_index % count);
                map_index /= count;
            }
        }
        return actions;
    };

    // Every profile's value under its own joint adversary; deviations reuse
    // these entries, so each deviated profile is re-attacked from scratch.
    std::vector<std::vector<std::vector<double>>> values(static_cast<std::size_t>(total));
    std::vector<char> decided(static_cast<std::size_t>(total), 0);
    for (long long p = 0; p < total; ++p) {
        const auto actions = profile_actions(p);
        TabularPolicy pi;
        pi.rows.assign(static_cast<std::size_t>(n_agents), {});
        for (int a = 0; a < n_agents; ++a) {
            auto& table = pi.rows[static_cast<std::size_t>(a)];
            table.assign(static_cast<std::size_t>(n_states),
                         std::vector<double>(
                             static_cast<std::size_t>(
                                 game.action_counts[static_cast<std::size_t>(a)]),
                             0.0));
            for (int s = 0; s < n_states; ++s)
                table[static_cast<std::size_t>(s)][static_cast<std::size_t>(
                    actions[static_cast<std::size_t>(a)][static_cast<std::size_t>(s)])] = 1.0;
        }
        const JointAdversaryResult joint = joint_optimal_adversary(game, pi);
        if (joint.status == JointAdversaryStatus::undecided) continue;
        values[static_cast<std::size_t>(p)] =
            policy_value_kernel(game, pi, joint.perturbation).values;
        decided[static_cast<std::size_t>(p)] = 1;
    }

    NashScanReport report;
    report.profiles_total = total;
    for (long long p = 0; p < total; ++p) {
        if (!decided[static_cast<std::size_t>(p)]) {
            ++report.undecided_profiles;
            continue;
        }
        bool improvable = false;
        bool inconclusive = false;
        for (int a = 0; a < n_agents && !improvable; ++a) {
            const long long stride = strides[static_cast<std::size_t>(a)];
            const long long count = map_counts[static_cast<std::size_t>(a)];
            const long long own = (p / stride) % count;
            const long long base = p - own * stride;
            for (long long alt = 0; alt < count && !improvable; ++alt) {
                if (alt == own) continue;
                const long long q = base + alt * stride;
                if (!decided[static_cast<std::size_t>(q)]) {
                    inconclusive = true;
                    continue;
                }
                for (int s = 0; s < n_states; ++s) {
                    if (values[static_cast<std::size_t>(q)][static_cast<std::size_t>(a)]
                              [static_cast<std::size_t>(s)] >
                        values[static_cast<std::size_t>(p)][static_cast<std::size_t>(a)]
                              [static_cast<std::size_t>(s)] +
                            1e-9) {
                        improvable = true;
                        break;
                    }
                }
            }
        }
        if (improvable) continue;
        if (inconclusive) {
            ++report.inconclusive_profiles;
            continue;
        }
        ++report.equilibria_count;
        if (!report.equilibrium_found) {
            report.equilibrium_found = true;
            report.equilibrium_actions = profile_actions(p);
        }
    }
    return report;
}

namespace {

std::string fixture_token(std::istringstream& in) {
    std::string token;
    if (!(in >> token)) throw std::runtime_error("sasg fixture: unexpected end of input");
    return token;
}

void fixture_expect(std::istringstream& in, const std::string& want) {
    const std::string got = fixture_token(in);
    if (got != want)
        throw std::runtime_error("sasg fixture: expected '" + want + "', got '" + got + "'");
}

int fixture_int(std::istringstream& in, const char* what) {
    int value = 0;
    if (!(in >> value))
        throw std::runtime_error(std::string("sasg fixture: expected integer for ") + what);
    return value;
}

double fixture_double(std::istringstream& in, const char* what) {
    double value = 0.0;
    if (!(in >> value))
        throw std::runtime_error(std::string("sasg fixture: expected number for ") + what);
    return value;
}

}  // namespace

void save_fixture(std::ostream& out, const TabularSaSG& game, const TabularPolicy* policy) {
    game.validate();
    if (policy != nullptr) policy->validate(game);
    const auto old_precision = out.precision(17);
    out << "sasg 1\n";
    out << "states " << game.state_count << '\n';
    out << "agents " << game.agent_count() << '\n';
    out << "attacked " << game.attacked_count << '\n';
    out << "gamma " << game.gamma << '\n';
    out << "actions";
    for (int n : game.action_counts) out << ' ' << n;
    out << '\n';
    out << "admissible\n";
    for (const auto& table : game.admissible) {
        for (const auto& views : table) {
            out << views.size();
            for (int view : views) out << ' ' << view;
            out << '\n';
        }
    }
    out << "transition\n";
    for (const auto& block : game.transition) {
        for (const auto& row : block) {
            for (std::size_t i = 0; i < row.size(); ++i) out << (i ? " " : "") << row[i];
            out << '\n';
        }
    }
    out << "reward\n";
    for (const auto& per_agent : game.reward) {
        for (const auto& block : per_agent) {
            for (const auto& row : block) {
                for (std::size_t i = 0; i < row.size(); ++i) out << (i ? " " : "") << row[i];
                out << '\n';
            }
        }
    }
    if (policy != nullptr) {
        out << "policy\n";
        for (const auto& table : policy->rows) {
            for (const auto& row : table) {
                for (std::size_t i = 0; i < row.size(); ++i) out << (i ? " " : "") << row[i];
                out << '\n';
            }
        }
    }
    out << "end\n";
    out.precision(old_precision);
    if (!out) throw std::runtime_error("sasg fixture: write failed");
}

GameFixture load_fixture(std::istream& in) {
    // strip # comments, then parse the remaining token stream
    std::string body, line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        body += line;
        body += '\n';
    }
    std::istringstream ts(body);

    fixture_expect(ts, "sasg");
    const int version = fixture_int(ts, "format version");
    if (version != 1) throw std::runtime_error("sasg fixture: unsupported format version");

    GameFixture fixture;
    TabularSaSG& game = fixture.game;
    fixture_expect(ts, "states");
    game.state_count = fixture_int(ts, "states");
    fixture_expect(ts, "agents");
    const int n_agents = fixture_int(ts, "agents");
    if (n_agents < 1) throw std::runtime_error("sasg fixture: agent count must be positive");
    fixture_expect(ts, "attacked");
    game.attacked_count = fixture_int(ts, "attacked");
    fixture_expect(ts, "gamma");
    game.gamma = fixture_double(ts, "gamma");
    fixture_expect(ts, "actions");
    game.action_counts.resize(static_cast<std::size_t>(n_agents));
    for (int a = 0; a < n_agents; ++a)
        game.action_counts[static_cast<std::size_t>(a)] = fixture_int(ts, "action count");
    if (game.state_count < 1) throw std::runtime_error("sasg fixture: state count must be positive");
    const int n_joint = game.joint_action_count();

    fixture_expect(ts, "admissible");
    game.admissible.assign(static_cast<std::size_t>(n_agents), {});
    for (auto& table : game.admissible) {
        table.assign(static_cast<std::size_t>(game.state_count), {});
        for (auto& views : table) {
            const int count = fixture_int(ts, "view count");
            if (count < 1) throw std::runtime_error("sasg fixture: view count must be positive");
            views.resize(static_cast<std::size_t>(count));
            for (int i = 0; i < count; ++i)
                views[static_cast<std::size_t>(i)] = fixture_int(ts, "view");
        }
    }
    fixture_expect(ts, "transition");
    game.transition.assign(
        static_cast<std::size_t>(game.state_count),
        std::vector<std::vector<double>>(
            static_cast<std::size_t>(n_joint),
            std::vector<double>(static_cast<std::size_t>(game.state_count), 0.0)));
    for (auto& block : game.transition)
        for (auto& row : block)
            for (auto& p : row) p = fixture_double(ts, "transition probability");
    fixture_expect(ts, "reward");
    game.reward.assign(
        static_cast<std::size_t>(n_agents),
        std::vector<std::vector<std::vector<double>>>(
            static_cast<std::size_t>(game.state_count),
            std::vector<std::vector<double>>(
                static_cast<std::size_t>(n_joint),
                std::vector<double>(static_cast<std::size_t>(game.state_count), 0.0))));
    for (auto& per_agent : game.reward)
        for (auto& block : per_agent)
            for (auto& row : block)
                for (auto& r : row) r = fixture_double(ts, "reward");

    std::string tail = fixture_token(ts);
    if (tail == "policy") {
        TabularPolicy pi;
        pi.rows.assign(static_cast<std::size_t>(n_agents), {});
        for (int a = 0; a < n_agents; ++a) {
            auto& table = pi.rows[static_cast<std::size_t>(a)];
            table.assign(static_cast<std::size_t>(game.state_count),
                         std::vector<double>(
                             static_cast<std::size_t>(
                                 game.action_counts[static_cast<std::size_t>(a)]),
                             0.0));
            for (auto& row : table)
                for (auto& p : row) p = fixture_double(ts, "policy probability");
        }
        fixture.policy = std::move(pi);
        tail = fixture_token(ts);
    }
    if (tail != "end") throw std::runtime_error("sasg fixture: expected 'end', got '" + tail + "'");

    game.validate();
    if (fixture.policy.has_value()) fixture.policy->validate(game);
    return fixture;
}

TabularSaSG random_game(std::mt19937_64& rng, const RandomGameSpec& spec) {
    require(spec.min_states >= 1 && spec.min_states <= spec.max_states,
            "random_game: bad state bounds");
    require(spec.min_agents >= 1 && spec.min_agents <= spec.max_agents,
            "random_game: bad agent bounds");
    require(spec.min_actions >= 1 && spec.min_actions <= spec.max_actions,
            "random_game: bad action bounds");
    require(spec.max_views >= 1, "random_game: need at least one admissible view");
    require(!spec.gammas.empty(), "random_game: need at least one gamma");
    for (double g : spec.gammas)
        require(std::isfinite(g) && g >= 0.0 && g < 1.0, "random_game: gamma must lie in [0,1)");
    require(std::isfinite(spec.reward_scale) && spec.reward_scale >= 0.0,
            "random_game: reward scale must be >= 0");

    TabularSaSG game;
    game.state_count = std::uniform_int_distribution<int>(spec.min_states, spec.max_states)(rng);
    const int n_agents =
        std::uniform_int_distribution<int>(spec.min_agents, spec.max_agents)(rng);
    game.action_counts.resize(static_cast<std::size_t>(n_agents));
    for (auto& n : game.action_counts)
        n = std::uniform_int_distribution<int>(spec.min_actions, spec.max_actions)(rng);
    game.attacked_count = std::uniform_int_distribution<int>(1, n_agents)(rng);
    game.gamma = spec.gammas[std::uniform_int_distribution<std::size_t>(
        0, spec.gammas.size() - 1)(rng)];

    game.admissible.assign(static_cast<std::size_t>(n_agents), {});
    for (auto& table : game.admissible) {
        table.assign(static_cast<std::size_t>(game.state_count), {});
        for (int s = 0; s < game.state_count; ++s) {
            const int cap = std::min(spec.max_views, game.state_count);
            const int size = std::uniform_int_distribution<int>(1, cap)(rng);
            std::vector<int> pool;
            for (int other = 0; other < game.state_count; ++other)
                if (other != s) pool.push_back(other);
            std::shuffle(pool.begin(), pool.end(), rng);
            std::vector<int> views(pool.begin(), pool.begin() + (size - 1));
            views.push_back(s);
            std::sort(views.begin(), views.end());
            table[static_cast<std::size_t>(s)] = std::move(views);
        }
    }

    const int n_joint = game.joint_action_count();
    std::uniform_real_distribution<double> mass(0.05, 1.0);
    game.transition.assign(
        static_cast<std::size_t>(game.state_count),
        std::vector<std::vector<double>>(
            static_cast<std::size_t>(n_joint),
            std::vector<double>(static_cast<std::size_t>(game.state_count), 0.0)));
    for (auto& block : game.transition) {
        for (auto& row : block) {
            double sum = 0.0;
            for (auto& p : row) {
                p = mass(rng);
                sum += p;
            }
            for (auto& p : row) p /= sum;
        }
    }
    std::uniform_real_distribution<double> pay(-spec.reward_scale, spec.reward_scale);
    game.reward.assign(
        static_cast<std::size_t>(n_agents),
        std::vector<std::vector<std::vector<double>>>(
            static_cast<std::size_t>(game.state_count),
            std::vector<std::vector<double>>(
                static_cast<std::size_t>(n_joint),
                std::vector<double>(static_cast<std::size_t>(game.state_count), 0.0))));
    for (auto& per_agent : game.reward)
        for (auto& block : per_agent)
            for (auto& row : block)
                for (auto& r : row) r = pay(rng);
    game.validate();
    return game;
}

TabularPolicy random_policy(std::mt19937_64& rng, const TabularSaSG& game) {
    game.validate();
    std::uniform_real_distribution<double> mass(0.05, 1.0);
    TabularPolicy pi;
    pi.rows.assign(static_cast<std::size_t>(game.agent_count()), {});
    for (int a = 0; a < game.agent_count(); ++a) {
        auto& table = pi.rows[static_cast<std::size_t>(a)];
        table.assign(
            static_cast<std::size_t>(game.state_count),
            std::vector<double>(
                static_cast<std::size_t>(game.action_counts[static_cast<std::size_t>(a)]), 0.0));
        for (auto& row : table) {
            double sum = 0.0;
            for (auto& p : row) {
                p = mass(rng);
                sum += p;
            }
            for (auto& p : row) p /= sum;
        }
    }
    return pi;
}

}  // namespace romfac::sasg
