#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "romfac/net.hpp"
#include "romfac/tape.hpp"
#include "romfac/tensor.hpp"

namespace romfac::mfac {

using diffcore::Activation;
using diffcore::FeedforwardNet;
using diffcore::GradientTape;
using diffcore::LeafKind;
using diffcore::TapeNet;
using diffcore::Tensor;
using diffcore::ValueId;

// ---- action distributions ------------------------------------------------

Tensor one_hot(int index, int count);
Tensor uniform_distribution(int count);
bool is_distribution(const Tensor& t, double tol = 1e-12);

// Arithmetic mean of the neighbors' one-hot actions. An empty neighbor
// set yields the uniform distribution (the average is undefined there and
// uniform is the neutral choice).
Tensor mean_action(const std::vector<Tensor>& neighbor_actions, int action_count);
Tensor mean_action_of(const std::vector<int>& neighbor_actions, int action_count);

// Index of the largest entry; ties go to the lowest index.
int argmax_index(const Tensor& values);
// Inverse-CDF draw from a distribution using one uniform variate.
int sample_index(const Tensor& distribution, std::mt19937_64& rng);

// ---- actor/critic bundles --------------------------------------------------

// Live and target copies of one actor-critic pair. The actor maps
// (observation, mean action) to action logits; the critic maps
// (observation, own action one-hot, mean action) to a scalar value.
struct AgentNets {
    FeedforwardNet actor;
    FeedforwardNet critic;
    FeedforwardNet target_actor;
    FeedforwardNet target_critic;
    int observation_size = 0;
    int action_count = 0;
};

AgentNets init_agent_nets(int observation_size, int action_count,
                          const std::vector<int>& hidden, Activation act, std::uint64_t seed);

// ---- plain evaluation (no gradients) ---------------------------------------

Tensor actor_distribution(const AgentNets& nets, const Tensor& obs, const Tensor& mean_prev,
                          bool use_target);
double critic_q(const AgentNets& nets, const Tensor& obs, int action, const Tensor& mean,
                bool use_target);
// Critic value for every own action at once.
std::vector<double> action_values(const AgentNets& nets, const Tensor& obs, const Tensor& mean,
                                  bool use_target);
// Expected target-critic value under the target policy at the next state:
// sum over own actions of pi_target(a | s', mean) * Q_target(s', a, mean).
double value_estimate(const AgentNets& nets, const Tensor& obs_next, const Tensor& mean);

// ---- stored transitions -----------------------------------------------------

// One environment transition, sliced per agent. An empty obs entry marks
// an agent with no sample this step (it was dead); done marks an agent
// whose episode ended with this transition, in which case obs_next is
// empty and value bootstrapping is skipped.
struct Experience {
    std::vector<Tensor> obs;
    std::vector<int> actions;
    std::vector<double> rewards;
    std::vector<Tensor> obs_next;
    std::vector<Tensor> means;
    std::vector<unsigned char> done;

    int agent_count() const { return static_cast<int>(actions.size()); }
    bool has_sample(int agent) const {
        return !obs[static_cast<std::size_t>(agent)].data.empty();
    }
    void validate() const;  // throws std::invalid_argument
};

// ---- taped building blocks --------------------------------------------------

ValueId taped_actor_logits(GradientTape& tape, const TapeNet& actor, ValueId obs, ValueId mean);
ValueId taped_actor_distribution(GradientTape& tape, const TapeNet& actor, ValueId obs,
                                 ValueId mean);
ValueId taped_critic_q(GradientTape& tape, const TapeNet& critic, ValueId obs,
                       ValueId action_onehot, ValueId mean);

// Temporal-difference target y = R + gamma * value_estimate(s'), or y = R
// on a terminal sample. Target networks only; never differentiated.
double td_target(const AgentNets& nets, int agent, const Experience& exp, double gamma);

// (y - Q(s, a, mean))^2 with y entering as a plain constant.
ValueId taped_td_loss(GradientTape& tape, const TapeNet& critic, const Tensor& obs, int action,
                      const Tensor& mean, double y);

// -log pi(a_sampled | s, mean) * weight, with a_sampled drawn from the
// target actor at (s, mean) and weight = Q_target(s', a_sampled, mean).
// Samples whose episode ended carry no next state, so they contribute no
// actor term (valid = false).
struct SampledActorLoss {
    ValueId loss;
    int sampled_action = -1;
    double weight = 0.0;
    bool valid = false;
};
SampledActorLoss taped_policy_gradient_loss(GradientTape& tape, const TapeNet& actor,
                                            const AgentNets& nets, int agent,
                                            const Experience& exp, std::mt19937_64& rng);

// ---- single-sample graphs (inspection and tests) ---------------------------

struct CriticLossGraph {
    GradientTape tape;
    TapeNet critic;
    ValueId loss;
    double target = 0.0;
};
CriticLossGraph critic_loss(const AgentNets& nets, int agent, const Experience& exp, double gamma);

struct ActorLossGraph {
    GradientTape tape;
    TapeNet actor;
    ValueId loss;
    int sampled_action = -1;
    double weight = 0.0;
};
ActorLossGraph policy_gradient_loss(const AgentNets& nets, int agent, const Experience& exp,
                                    std::mt19937_64& rng);

// ---- parameter updates -------------------------------------------------------

// Gradient-descent step on the parameters registered in ids.
void sgd_step(FeedforwardNet& net, const GradientTape& tape, const TapeNet& ids,
              double learning_rate);

// target <- tau * live + (1 - tau) * target, per parameter.
void soft_update(AgentNets& nets, double tau_actor, double tau_critic);

}  // namespace romfac::mfac
