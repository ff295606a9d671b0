#pragma once

#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace romfac::sasg {

// Finite stochastic game in which an adversary may substitute the state some
// agents perceive. Joint actions are indexed in mixed radix with agent 0 most
// significant. The first `attacked_count` agents are attackable;
// `admissible[j][s]` lists the states agent j can be made to perceive when
// the true state is s (strictly increasing, always containing s itself).
struct TabularSaSG {
    int state_count = 0;
    std::vector<int> action_counts;   // per agent
    int attacked_count = 0;
    double gamma = 0.0;
    std::vector<std::vector<std::vector<int>>> admissible;              // [agent][state] -> views
    std::vector<std::vector<std::vector<double>>> transition;           // [state][joint action] -> next-state probs
    std::vector<std::vector<std::vector<std::vector<double>>>> reward;  // [agent][state][joint action][next state]

    int agent_count() const { return static_cast<int>(action_counts.size()); }
    int joint_action_count() const;
    int encode_joint(const std::vector<int>& actions) const;
    std::vector<int> decode_joint(int joint) const;
    void validate() const;
};

// Behavioural policy: rows[agent][perceived state] is a distribution over
// that agent's actions.
struct TabularPolicy {
    std::vector<std::vector<std::vector<double>>> rows;
    void validate(const TabularSaSG& game) const;
};

// Deterministic state substitution for every attackable agent.
struct Perturbation {
    std::vector<std::vector<int>> maps;  // [attacked agent][true state] -> perceived state
    static Perturbation identity(const TabularSaSG& game);
    void validate(const TabularSaSG& game) const;
};

// Discounted state values, one vector over states per agent.
struct ValueVector {
    std::vector<std::vector<double>> values;  // [agent][state]
};

// Product distribution over joint actions when agent i acts from row views[i].
std::vector<double> joint_policy_given_views(const TabularSaSG& game, const TabularPolicy& pi,
                                             const std::vector<int>& views);

// Joint distribution at `state`: attacked agents act from their substituted
// state, everyone else from the true one.
std::vector<double> joint_perturbed_policy(const TabularSaSG& game, const TabularPolicy& pi,
                                           const Perturbation& v, int state);

// Exact values of a fixed policy/perturbation pair: direct linear solve of
// the induced Bellman system, cross-checked against value iteration.
ValueVector policy_value(const TabularSaSG& game, const TabularPolicy& pi, const Perturbation& v);

// Expected immediate reward of the joint action plus the discounted value of
// the successor, using previously computed `values` for `agent`.
double action_value(const TabularSaSG& game, const ValueVector& values, int agent, int state,
                    int joint_action);

struct BellmanResult {
    std::vector<double> values;    // updated values for the stepped agent
    std::vector<int> chosen_view;  // minimising perceived state per true state
};

// One application of the minimising backup for `agent`: its perceived state
// ranges over admissible[agent][s] while the other attacked agents keep the
// maps in `others` (the entry for `agent` itself is ignored). Ties resolve to
// the lowest admissible state index.
BellmanResult bellman_step(const TabularSaSG& game, const TabularPolicy& pi, int agent,
                           const Perturbation& others, const std::vector<double>& current);

struct AdversaryResult {
    std::vector<int> map;        // worst-case perceived state per true state
    std::vector<double> values;  // fixed-point values of the attacked agent
};

// Fixed point of the minimising backup for one attacked agent, holding the
// other attacked agents' maps fixed.
AdversaryResult optimal_adversary(const TabularSaSG& game, const TabularPolicy& pi, int agent,
                                  const Perturbation& others);

enum class JointAdversaryStatus { converged, exhaustive, undecided };
std::string joint_adversary_status_name(JointAdversaryStatus status);

struct JointAdversaryResult {
    Perturbation perturbation;  // identity placeholder when undecided
    JointAdversaryStatus status = JointAdversaryStatus::undecided;
};

// Joint perturbation in which every attacked agent's map is a best response
// to the others: best-response iteration first, then an exhaustive stability
// search over the joint map space (when it has at most a million members),
// otherwise `undecided`.
JointAdversaryResult joint_optimal_adversary(const TabularSaSG& game, const TabularPolicy& pi);

// Half the l1 distance between two distributions of equal support size.
double tv_distance(const std::vector<double>& p, const std::vector<double>& q);

struct CertificateReport {
    double lhs = 0.0;   // worst-state value drop suffered by the attacked agent
    double rhs = 0.0;   // smoothness bound on that drop
    double zeta = 0.0;  // bound constant
    bool holds = false;
    std::vector<int> adversary_map;  // the agent's worst-case perceived state per state
    std::vector<int> worst_view;     // per state: admissible view shifting the policy most
};

// Certifies that the value an attacked agent loses to the optimal attack
// (relative to itself being left alone while the other attacks stay in
// place) is bounded by zeta times the largest total-variation shift the
// attack can induce on the joint policy.
CertificateReport value_drop_certificate(const TabularSaSG& game, const TabularPolicy& pi,
                                         int agent);

struct NashScanReport {
    long long profiles_total = 0;
    long long equilibria_count = 0;
    long long undecided_profiles = 0;     // a profile's own joint adversary was undecided
    long long inconclusive_profiles = 0;  // a deviation's adversary was undecided
    bool equilibrium_found = false;
    std::vector<std::vector<int>> equilibrium_actions;  // [agent][state] of the first equilibrium
};

// Enumerates every deterministic joint policy, solves the joint adversary for
// each, and reports which profiles no agent can improve upon at any state by
// a deterministic deviation (the deviated profile is re-attacked from
// scratch). Refuses games with more than a million deterministic profiles.
NashScanReport nash_existence_scan(const TabularSaSG& game);

// Text fixture: the game plus an optional policy to certify against.
struct GameFixture {
    TabularSaSG game;
    std::optional<TabularPolicy> policy;
};

void save_fixture(std::ostream& out, const TabularSaSG& game,
                  const TabularPolicy* policy = nullptr);
GameFixture load_fixture(std::istream& in);

// Random instances for property sweeps. Sizes stay small enough for the
// exhaustive oracles; at least one agent is always attackable.
struct RandomGameSpec {
    int min_states = 2;
    int max_states = 5;
    int min_agents = 1;
    int max_agents = 2;
    int min_actions = 2;
    int max_actions = 3;
    int max_views = 3;  // cap on |admissible[j][s]|
    std::vector<double> gammas = {0.5, 0.9, 0.99};
    double reward_scale = 1.0;
};

TabularSaSG random_game(std::mt19937_64& rng, const RandomGameSpec& spec = {});
TabularPolicy random_policy(std::mt19937_64& rng, const TabularSaSG& game);

}  // namespace romfac::sasg
