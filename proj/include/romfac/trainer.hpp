#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "romfac/adversary.hpp"
#include "romfac/env.hpp"
#include "romfac/mfac.hpp"
#include "romfac/schedule.hpp"

namespace romfac::trainer {

using diffcore::GradientTape;
using diffcore::TapeNet;
using diffcore::Tensor;
using diffcore::ValueId;

// ---- training variants ------------------------------------------------------

// The five trained configurations. They differ only in how the action-loss
// weight mu and the attack radius epsilon move over the rounds:
//   mfac      mu = 0 always, no attack
//   sa_mfac   constant mu, epsilon ramps up once and stays
//   sa_mfac3  constant mu, epsilon restarts its ramp every loop
//   romfac1   like romfac but meant to be run with a single loop
//   romfac    mu ramps repetitively, constant epsilon
enum class Variant { mfac, sa_mfac, sa_mfac3, romfac1, romfac };

Variant variant_from_name(const std::string& name);
std::string variant_name(Variant v);

struct TrainerConfig {
    Variant variant = Variant::mfac;

    // shape shared by both schedules (see mu_schedule / epsilon_schedule)
    double mu_target = 0.0;       // action-loss weight the schedule reaches
    double epsilon_target = 0.0;  // attack radius the schedule reaches
    int warmup_rounds = 1;        // rounds trained clean before any rise
    int loop_rounds = 1;          // length of one rise-plateau loop
    int loop_count = 3;           // loops after the warmup
    double ramp_fraction = 0.5;   // share of a loop spent rising

    // networks and optimization
    std::vector<int> hidden = {32, 32};
    diffcore::Activation activation = diffcore::Activation::relu;
    double actor_lr = 1e-3;
    double critic_lr = 1e-3;
    double tau_actor = 0.01;
    double tau_critic = 0.01;
    double gamma = 0.95;
    int minibatch = 32;
    int buffer_capacity = 2048;

    // training-time attack; its epsilon field is ignored and replaced by the
    // scheduled radius round by round
    adversary::AttackConfig attack;

    ScheduleSpec mu_schedule() const;
    ScheduleSpec epsilon_schedule() const;
    int total_rounds() const { return warmup_rounds + loop_count * loop_rounds; }
    void validate() const;  // throws std::invalid_argument
};

// ---- replay buffer ----------------------------------------------------------

// Bounded ring of step transitions. Once full, new entries overwrite the
// oldest. Minibatches are drawn uniformly without replacement.
class ReplayBuffer {
public:
    explicit ReplayBuffer(int capacity);

    int capacity() const { return capacity_; }
    int size() const { return static_cast<int>(slots_.size()); }
    bool full() const { return size() == capacity_; }

    void push(mfac::Experience exp);
    const mfac::Experience& at(int index) const;

    // `count` distinct slot indices, uniform over the current contents
    std::vector<int> sample_indices(int count, std::mt19937_64& rng) const;

    void save(std::ostream& out) const;
    static ReplayBuffer load(std::istream& in);

private:
    int capacity_ = 0;
    int next_ = 0;  // slot the next push overwrites once the ring is full
    std::vector<mfac::Experience> slots_;
};

// ---- robust actor objective ---------------------------------------------------

// Single-sample actor objective: the policy-gradient term plus mu times the
// cross-entropy between the policy at the perturbed observation and the greedy
// action at the clean one. Either term can be absent — the gradient term needs
// a non-terminal sample, the robustness term needs mu > 0. With mu == 0 the
// graph is exactly the plain policy-gradient graph. Throws std::logic_error
// when both terms are absent.
struct RobustActorLoss {
    GradientTape tape;
    TapeNet actor;
    ValueId loss;
    bool has_pg = false;
    double pg_value = 0.0;      // value of the policy-gradient term
    double weight = 0.0;        // critic weight inside the policy-gradient term
    double action_value = 0.0;  // value of the cross-entropy term
    int sampled_action = -1;
    int label = -1;
};

RobustActorLoss robust_actor_loss(const mfac::AgentNets& nets, int agent,
                                  const mfac::Experience& exp, const Tensor& adv_obs, double mu,
                                  std::mt19937_64& rng);

// ---- the training loop --------------------------------------------------------

struct RoundMetrics {
    int round = 0;
    double mu = 0.0;
    double epsilon = 0.0;
    int episode_steps = 0;
    bool updated = false;             // false while the buffer is warming up
    std::vector<double> team_reward;  // episode reward per agent, averaged over the team
    std::vector<double> critic_loss;  // minibatch means, one entry per team
    std::vector<double> actor_loss;
    std::vector<double> action_loss;
};

void write_metrics_header(std::ostream& out, int team_count);
void append_metrics_row(std::ostream& out, const RoundMetrics& row);

struct TrainerRun {
    TrainerConfig config;
    std::uint64_t seed = 0;
    int completed_rounds = 0;
    std::vector<mfac::AgentNets> team_nets;  // one entry per team
    ReplayBuffer buffer{1};
};

// Fresh run: one network pair per team, an empty buffer, round counter at 0.
TrainerRun init_run(const TrainerConfig& config, const Env& env, std::uint64_t seed);

// One training round: play one episode, store every step, then — once the
// buffer holds a full minibatch — run one critic and one actor update per team
// followed by the soft target updates. Everything stochastic in round m is a
// pure function of (run.seed, m), so a run reloaded from a checkpoint
// continues bit-identically.
RoundMetrics train_round(TrainerRun& run, Env& env);

// splitmix64, used to derive the per-round random streams from (seed, round).
std::uint64_t mix_seed(std::uint64_t x);

// ---- checkpoints ----------------------------------------------------------------

// Binary snapshot of a run between rounds: config, seed, round counter, all
// four networks per team, and the full buffer contents.
void save_checkpoint(std::ostream& out, const TrainerRun& run);
TrainerRun load_checkpoint(std::istream& in);  // throws std::runtime_error on bad data

}  // namespace romfac::trainer
