#include "romfac/mfac.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace romfac::mfac {

Tensor one_hot(int index, int count) {
    if (count <= 0) throw std::invalid_argument("one_hot: count must be positive");
    if (index < 0 || index >= count)
        throw std::invalid_argument("one_hot: index " + std::to_string(index) + " out of range");
    Tensor t = Tensor::zeros({count});
    t[index] = 1.0;
    return t;
}

Tensor uniform_distribution(int count) {
    if (count <= 0) throw std::invalid_argument("uniform_distribution: count must be positive");
    return Tensor({count}, std::vector<double>(static_cast<std::size_t>(count), 1.0 / count));
}

bool is_distribution(const Tensor& t, double tol) {
    if (t.size() == 0) return false;
    double sum = 0.0;
    for (double v : t.data) {
        if (!(v >= 0.0)) return false;
        sum += v;
    }
    return std::abs(sum - 1.0) <= tol;
}

Tensor mean_action(const std::vector<Tensor>& neighbor_actions, int action_count) {
    if (neighbor_actions.empty()) return uniform_distribution(action_count);
    Tensor mean = Tensor::zeros({action_count});
    for (const Tensor& a : neighbor_actions) {
        if (a.size() != action_count)
            throw std::invalid_argument("mean_action: action length mismatch");
        int ones = 0;
        for (int i = 0; i < a.size(); ++i) {
            if (a[i] == 1.0)
                ++ones;
            else if (a[i] != 0.0)
                throw std::invalid_argument("mean_action: input is not one-hot");
            mean[i] += a[i];
        }
        if (ones != 1) throw std::invalid_argument("mean_action: input is not one-hot");
    }
    const double inv = 1.0 / static_cast<double>(neighbor_actions.size());
    for (double& v : mean.data) v *= inv;
    return mean;
}

Tensor mean_action_of(const std::vector<int>& neighbor_actions, int action_count) {
    if (neighbor_actions.empty()) return uniform_distribution(action_count);
    Tensor mean = Tensor::zeros({action_count});
    for (int a : neighbor_actions) {
        if (a < 0 || a >= action_count)
            throw std::invalid_argument("mean_action_of: action index out of range");
        mean[a] += 1.0;
    }
    const double inv = 1.0 / static_cast<double>(neighbor_actions.size());
    for (double& v : mean.data) v *= inv;
    return mean;
}

int argmax_index(const Tensor& values) {
    if (values.size() == 0) throw std::invalid_argument("argmax_index: empty input");
    int best = 0;
    for (int i = 1; i < values.size(); ++i)
        if (values[i] > values[best]) best = i;
    return best;
}

int sample_index(const Tensor& distribution, std::mt19937_64& rng) {
    if (distribution.size() == 0) throw std::invalid_argument("sample_index: empty distribution");
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    double cumulative = 0.0;
    for (int i = 0; i < distribution.size(); ++i) {
        cumulative += distribution[i];
        if (u < cumulative) return i;
    }
    return distribution.size() - 1;  // guard against rounding shortfall
}

AgentNets init_agent_nets(int observation_size, int action_count,
                          const std::vector<int>& hidden, Activation act, std::uint64_t seed) {
    if (observation_size <= 0 || action_count <= 0)
        throw std::invalid_argument("init_agent_nets: sizes must be positive");
    std::vector<int> actor_widths, critic_widths;
    actor_widths.push_back(observation_size + action_count);
    critic_widths.push_back(observation_size + 2 * action_count);
    for (int h : hidden) {
        actor_widths.push_back(h);
        critic_widths.push_back(h);
    }
    actor_widths.push_back(action_count);
    critic_widths.push_back(1);

    AgentNets nets;
    nets.observation_size = observation_size;
    nets.action_count = action_count;
    nets.actor = diffcore::init_net(actor_widths, act, seed);
    nets.critic = diffcore::init_net(critic_widths, act, seed + 0x9e3779b97f4a7c15ull);
    nets.target_actor = nets.actor;
    nets.target_critic = nets.critic;
    return nets;
}

namespace {

Tensor concat_plain(const Tensor& a, const Tensor& b) {
    std::vector<double> data;
    data.reserve(a.data.size() + b.data.size());
    data.insert(data.end(), a.data.begin(), a.data.end());
    data.insert(data.end(), b.data.begin(), b.data.end());
    return Tensor::vector(std::move(data));
}

Tensor concat_plain(const Tensor& a, const Tensor& b, const Tensor& c) {
    return concat_plain(concat_plain(a, b), c);
}

}  // namespace

Tensor actor_distribution(const AgentNets& nets, const Tensor& obs, const Tensor& mean_prev,
                          bool use_target) {
    const FeedforwardNet& actor = use_target ? nets.target_actor : nets.actor;
    return diffcore::softmax(diffcore::forward(actor, concat_plain(obs, mean_prev)));
}

double critic_q(const AgentNets& nets, const Tensor& obs, int action, const Tensor& mean,
                bool use_target) {
    const FeedforwardNet& critic = use_target ? nets.target_critic : nets.critic;
    const Tensor in = concat_plain(obs, one_hot(action, nets.action_count), mean);
    return diffcore::forward(critic, in)[0];
}

std::vector<double> action_values(const AgentNets& nets, const Tensor& obs, const Tensor& mean,
                                  bool use_target) {
    std::vector<double> out(static_cast<std::size_t>(nets.action_count));
    for (int a = 0; a < nets.action_count; ++a)
        out[static_cast<std::size_t>(a)] = critic_q(nets, obs, a, mean, use_target);
    return out;
}

double value_estimate(const AgentNets& nets, const Tensor& obs_next, const Tensor& mean) {
    const Tensor dist = actor_distribution(nets, obs_next, mean, true);
    const std::vector<double> q = action_values(nets, obs_next, mean, true);
    double v = 0.0;
    for (int a = 0; a < nets.action_count; ++a)
        v += dist[a] * q[static_cast<std::size_t>(a)];
    return v;
}

void Experience::validate() const {
    const std::size_t n = actions.size();
    if (obs.size() != n || rewards.size() != n || obs_next.size() != n || means.size() != n ||
        done.size() != n)
        throw std::invalid_argument("experience: field lengths disagree");
    for (std::size_t j = 0; j < n; ++j) {
        if (obs[j].data.empty()) continue;  // no sample for this agent
        if (means[j].data.empty())
            throw std::invalid_argument("experience: sample without a mean action");
        if (done[j] ? !obs_next[j].data.empty() : obs_next[j].data.empty())
            throw std::invalid_argument("experience: next observation must be empty exactly "
                                        "for terminal samples");
    }
}

ValueId taped_actor_logits(GradientTape& tape, const TapeNet& actor, ValueId obs, ValueId mean) {
    return net_forward(tape, actor, tape.concat({obs, mean}));
}

ValueId taped_actor_distribution(GradientTape& tape, const TapeNet& actor, ValueId obs,
                                 ValueId mean) {
    return tape.softmax(taped_actor_logits(tape, actor, obs, mean));
}

ValueId taped_critic_q(GradientTape& tape, const TapeNet& critic, ValueId obs,
                       ValueId action_onehot, ValueId mean) {
    return net_forward(tape, critic, tape.concat({obs, action_onehot, mean}));
}

double td_target(const AgentNets& nets, int agent, const Experience& exp, double gamma) {
    if (!(gamma >= 0.0 && gamma < 1.0))
        throw std::invalid_argument("td_target: discount must lie in [0,1)");
    const std::size_t j = static_cast<std::size_t>(agent);
    if (!exp.has_sample(agent)) throw std::invalid_argument("td_target: agent has no sample");
    double y = exp.rewards[j];
    if (!exp.done[j]) y += gamma * value_estimate(nets, exp.obs_next[j], exp.means[j]);
    return y;
}

ValueId taped_td_loss(GradientTape& tape, const TapeNet& critic, const Tensor& obs, int action,
                      const Tensor& mean, double y) {
    const int n = static_cast<int>(mean.size());
    ValueId q = taped_critic_q(tape, critic, tape.constant(obs),
                               tape.constant(one_hot(action, n)), tape.constant(mean));
    // (y - q)^2
    return tape.square(tape.shift(tape.scale(q, -1.0), y));
}

SampledActorLoss taped_policy_gradient_loss(GradientTape& tape, const TapeNet& actor,
                                            const AgentNets& nets, int agent,
                                            const Experience& exp, std::mt19937_64& rng) {
    const std::size_t j = static_cast<std::size_t>(agent);
    if (!exp.has_sample(agent))
        throw std::invalid_argument("policy gradient: agent has no sample");

    SampledActorLoss out;
    const Tensor dist = actor_distribution(nets, exp.obs[j], exp.means[j], true);
    out.sampled_action = sample_index(dist, rng);
    if (exp.done[j]) return out;  // no next state to weight the sample with

    out.weight = critic_q(nets, exp.obs_next[j], out.sampled_action, exp.means[j], true);
    ValueId probs = taped_actor_distribution(tape, actor, tape.constant(exp.obs[j]),
                                             tape.constant(exp.means[j]));
    out.loss = tape.scale(tape.cross_entropy(probs, out.sampled_action), out.weight);
    out.valid = true;
    return out;
}

CriticLossGraph critic_loss(const AgentNets& nets, int agent, const Experience& exp,
                            double gamma) {
    exp.validate();
    CriticLossGraph g;
    g.target = td_target(nets, agent, exp, gamma);
    g.critic = put_on_tape(g.tape, nets.critic, LeafKind::parameter);
    const std::size_t j = static_cast<std::size_t>(agent);
    g.loss = taped_td_loss(g.tape, g.critic, exp.obs[j], exp.actions[j], exp.means[j], g.target);
    return g;
}

ActorLossGraph policy_gradient_loss(const AgentNets& nets, int agent, const Experience& exp,
                                    std::mt19937_64& rng) {
    exp.validate();
    const std::size_t j = static_cast<std::size_t>(agent);
    if (exp.has_sample(agent) && exp.done[j])
        throw std::logic_error("policy gradient graph: terminal sample carries no actor term");
    ActorLossGraph g;
    g.actor = put_on_tape(g.tape, nets.actor, LeafKind::parameter);
    SampledActorLoss s = taped_policy_gradient_loss(g.tape, g.actor, nets, agent, exp, rng);
    g.loss = s.loss;
    g.sampled_action = s.sampled_action;
    g.weight = s.weight;
    return g;
}

void sgd_step(FeedforwardNet& net, const GradientTape& tape, const TapeNet& ids,
              double learning_rate) {
    if (ids.weights.size() != net.weights.size() || ids.biases.size() != net.biases.size())
        throw std::invalid_argument("sgd_step: tape ids do not match the net layout");
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        const Tensor& gw = tape.gradient(ids.weights[l]);
        for (int i = 0; i < net.weights[l].size(); ++i) net.weights[l][i] -= learning_rate * gw[i];
        const Tensor& gb = tape.gradient(ids.biases[l]);
        for (int i = 0; i < net.biases[l].size(); ++i) net.biases[l][i] -= learning_rate * gb[i];
    }
}

namespace {

void blend(FeedforwardNet& target, const FeedforwardNet& live, double tau) {
    if (!(tau >= 0.0 && tau <= 1.0))
        throw std::invalid_argument("soft_update: rate must lie in [0,1]");
    for (std::size_t l = 0; l < live.weights.size(); ++l) {
        for (int i = 0; i < live.weights[l].size(); ++i)
            target.weights[l][i] = tau * live.weights[l][i] + (1.0 - tau) * target.weights[l][i];
        for (int i = 0; i < live.biases[l].size(); ++i)
            target.biases[l][i] = tau * live.biases[l][i] + (1.0 - tau) * target.biases[l][i];
    }
}

}  // namespace

void soft_update(AgentNets& nets, double tau_actor, double tau_critic) {
    blend(nets.target_actor, nets.actor, tau_actor);
    blend(nets.target_critic, nets.critic, tau_critic);
}

}  // namespace romfac::mfac
