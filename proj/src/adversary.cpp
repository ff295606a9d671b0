#include "romfac/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace romfac::adversary {

void AttackConfig::validate() const {
    if (!std::isfinite(epsilon) || epsilon < 0.0)
        throw std::invalid_argument("attack: epsilon must be finite and non-negative");
    if (!std::isfinite(step_size) || step_size < 0.0)
        throw std::invalid_argument("attack: step size must be finite and non-negative");
    if (steps < 0 || steps > max_attack_steps)
        throw std::invalid_argument("attack: steps must lie in [0," +
                                    std::to_string(max_attack_steps) + "]");
    if (!std::isfinite(clip_low) || !std::isfinite(clip_high) || clip_low > clip_high)
        throw std::invalid_argument("attack: clip range is invalid");
}

double AttackConfig::effective_step() const {
    if (step_size > 0.0) return step_size;
    if (steps == 0) return 0.0;
    return 2.5 * epsilon / steps;
}

int action_label(const mfac::AgentNets& nets, const Tensor& obs, const Tensor& mean) {
    return mfac::argmax_index(mfac::actor_distribution(nets, obs, mean, false));
}

ValueId taped_action_loss(GradientTape& tape, const TapeNet& actor, ValueId adv_obs,
                          ValueId mean, int label) {
    return tape.cross_entropy(mfac::taped_actor_distribution(tape, actor, adv_obs, mean), label);
}

double action_loss(const mfac::AgentNets& nets, const Tensor& adv_obs, const Tensor& mean,
                   int label) {
    return diffcore::cross_entropy(mfac::actor_distribution(nets, adv_obs, mean, false), label);
}

std::vector<AdversarialState> pgd_attack_batch(const mfac::AgentNets& nets,
                                               const std::vector<Tensor>& obs,
                                               const std::vector<Tensor>& means,
                                               const AttackConfig& cfg) {
    cfg.validate();
    if (obs.size() != means.size())
        throw std::invalid_argument("attack: one mean action per observation required");
    if (obs.empty()) return {};

    std::vector<AdversarialState> out(obs.size());
    std::vector<int> labels(obs.size());
    for (std::size_t i = 0; i < obs.size(); ++i) {
        out[i].base = obs[i];
        out[i].perturbed = obs[i];
        labels[i] = action_label(nets, obs[i], means[i]);
    }

    const double beta = cfg.effective_step();
    if (cfg.epsilon > 0.0 && beta > 0.0) {
        for (int u = 0; u < cfg.steps; ++u) {
            GradientTape tape;
            TapeNet actor = put_on_tape(tape, nets.actor, diffcore::LeafKind::constant);
            std::vector<ValueId> adv(obs.size());
            std::vector<ValueId> losses(obs.size());
            for (std::size_t i = 0; i < obs.size(); ++i) {
                adv[i] = tape.leaf(out[i].perturbed, diffcore::LeafKind::input);
                losses[i] = taped_action_loss(tape, actor, adv[i], tape.constant(means[i]),
                                              labels[i]);
            }
            // each loss term touches only its own observation leaf, so one
            // backward pass yields every per-sample gradient
            tape.backward(losses.size() == 1 ? losses[0] : tape.sum(losses));

            for (std::size_t i = 0; i < obs.size(); ++i) {
                const Tensor& g = tape.gradient(adv[i]);
                Tensor& cur = out[i].perturbed;
                const Tensor& base = out[i].base;
                for (int k = 0; k < cur.size(); ++k) {
                    const double sign = g[k] > 0.0 ? 1.0 : (g[k] < 0.0 ? -1.0 : 0.0);
                    double v = cur[k] + beta * sign;
                    v = std::clamp(v, base[k] - cfg.epsilon, base[k] + cfg.epsilon);
                    v = std::clamp(v, cfg.clip_low, cfg.clip_high);
                    cur[k] = v;
                }
            }
        }
    }

    for (std::size_t i = 0; i < obs.size(); ++i) {
        out[i].delta = out[i].perturbed;
        for (int k = 0; k < out[i].delta.size(); ++k) out[i].delta[k] -= out[i].base[k];
    }
    return out;
}

AdversarialState pgd_attack(const mfac::AgentNets& nets, const Tensor& obs, const Tensor& mean,
                            const AttackConfig& cfg) {
    return pgd_attack_batch(nets, {obs}, {mean}, cfg)[0];
}

}  // namespace romfac::adversary
