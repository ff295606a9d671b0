#pragma once

#include <vector>

#include "romfac/mfac.hpp"
#include "romfac/tape.hpp"
#include "romfac/tensor.hpp"

namespace romfac::adversary {

using diffcore::GradientTape;
using diffcore::TapeNet;
using diffcore::Tensor;
using diffcore::ValueId;

inline constexpr int max_attack_steps = 64;

// Projected-gradient attack budget: an epsilon-ball in the max norm
// around the clean observation, intersected with the valid feature range.
struct AttackConfig {
    double epsilon = 0.0;
    double step_size = 0.0;  // 0 selects 2.5 * epsilon / steps
    int steps = 10;
    double clip_low = 0.0;
    double clip_high = 1.0;

    void validate() const;       // throws std::invalid_argument
    double effective_step() const;
};

struct AdversarialState {
    Tensor base;
    Tensor perturbed;
    Tensor delta;  // perturbed - base
};

// Index the live actor would choose on the clean observation; ties go to
// the lowest index.
int action_label(const mfac::AgentNets& nets, const Tensor& obs, const Tensor& mean);

// Cross entropy of the live actor's distribution at adv_obs against the
// clean-observation label; differentiable in both the actor parameters
// and adv_obs.
ValueId taped_action_loss(GradientTape& tape, const TapeNet& actor, ValueId adv_obs,
                          ValueId mean, int label);
double action_loss(const mfac::AgentNets& nets, const Tensor& adv_obs, const Tensor& mean,
                   int label);

// Iterated sign-gradient ascent on the action loss, re-projected after
// every step. Deterministic; uses only frozen copies of the live actor.
AdversarialState pgd_attack(const mfac::AgentNets& nets, const Tensor& obs, const Tensor& mean,
                            const AttackConfig& cfg);

// Same attack for a batch of observations sharing one actor; one gradient
// tape per iteration instead of one per sample.
std::vector<AdversarialState> pgd_attack_batch(const mfac::AgentNets& nets,
                                               const std::vector<Tensor>& obs,
                                               const std::vector<Tensor>& means,
                                               const AttackConfig& cfg);

}  // namespace romfac::adversary
