#include "romfac/trainer.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <istream>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <utility>

namespace romfac::trainer {

namespace {

// little-endian binary helpers, mirroring the network serialization

void write_u32(std::ostream& out, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t read_u32(std::istream& in, const char* what) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (!in) throw std::runtime_error(std::string("checkpoint load: truncated ") + what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}

void write_u64(std::ostream& out, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t read_u64(std::istream& in, const char* what) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    if (!in) throw std::runtime_error(std::string("checkpoint load: truncated ") + what);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

void write_f64(std::ostream& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    write_u64(out, bits);
}

double read_f64(std::istream& in, const char* what) {
    const std::uint64_t bits = read_u64(in, what);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

void write_tensor(std::ostream& out, const Tensor& t) {
    write_u32(out, static_cast<std::uint32_t>(t.shape.size()));
    for (int d : t.shape) write_u32(out, static_cast<std::uint32_t>(d));
    for (double v : t.data) write_f64(out, v);
}

Tensor read_tensor(std::istream& in) {
    const std::uint32_t rank = read_u32(in, "tensor rank");
    if (rank > 8) throw std::runtime_error("checkpoint load: implausible tensor rank");
    if (rank == 0) return Tensor{};  // empty slot, e.g. a terminal next observation
    diffcore::Shape shape;
    long long total = 1;
    for (std::uint32_t i = 0; i < rank; ++i) {
        const std::uint32_t d = read_u32(in, "tensor shape");
        if (d > (1u << 24)) throw std::runtime_error("checkpoint load: implausible tensor dim");
        shape.push_back(static_cast<int>(d));
        total *= d;
    }
    std::vector<double> data(static_cast<std::size_t>(total));
    for (double& v : data) v = read_f64(in, "tensor data");
    return Tensor(std::move(shape), std::move(data));
}

void write_experience(std::ostream& out, const mfac::Experience& e) {
    const int n = e.agent_count();
    write_u32(out, static_cast<std::uint32_t>(n));
    for (int j = 0; j < n; ++j) {
        const auto k = static_cast<std::size_t>(j);
        write_tensor(out, e.obs[k]);
        write_u32(out, static_cast<std::uint32_t>(e.actions[k]));
        write_f64(out, e.rewards[k]);
        write_tensor(out, e.obs_next[k]);
        write_tensor(out, e.means[k]);
        write_u32(out, e.done[k] ? 1u : 0u);
    }
}

mfac::Experience read_experience(std::istream& in) {
    const std::uint32_t n = read_u32(in, "experience header");
    if (n == 0 || n > 100000) throw std::runtime_error("checkpoint load: implausible agent count");
    mfac::Experience e;
    e.obs.resize(n);
    e.actions.resize(n);
    e.rewards.resize(n);
    e.obs_next.resize(n);
    e.means.resize(n);
    e.done.resize(n);
    for (std::uint32_t j = 0; j < n; ++j) {
        e.obs[j] = read_tensor(in);
        e.actions[j] = static_cast<int>(read_u32(in, "experience action"));
        e.rewards[j] = read_f64(in, "experience reward");
        e.obs_next[j] = read_tensor(in);
        e.means[j] = read_tensor(in);
        e.done[j] = read_u32(in, "experience done flag") ? 1 : 0;
    }
    e.validate();
    return e;
}

void format_cell(std::ostream& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf;
}

}  // namespace

// ---- variants -----------------------------------------------------------------

Variant variant_from_name(const std::string& name) {
    if (name == "mfac") return Variant::mfac;
    if (name == "sa-mfac") return Variant::sa_mfac;
    if (name == "sa-mfac3") return Variant::sa_mfac3;
    if (name == "romfac1") return Variant::romfac1;
    if (name == "romfac") return Variant::romfac;
    throw std::invalid_argument("unknown variant '" + name +
                                "' (expected mfac, sa-mfac, sa-mfac3, romfac1 or romfac)");
}

std::string variant_name(Variant v) {
    switch (v) {
        case Variant::mfac: return "mfac";
        case Variant::sa_mfac: return "sa-mfac";
        case Variant::sa_mfac3: return "sa-mfac3";
        case Variant::romfac1: return "romfac1";
        case Variant::romfac: return "romfac";
    }
    throw std::invalid_argument("variant_name: bad enum value");
}

ScheduleSpec TrainerConfig::mu_schedule() const {
    ScheduleSpec s;
    s.target = mu_target;
    s.warmup_rounds = warmup_rounds;
    s.loop_rounds = loop_rounds;
    s.loop_count = loop_count;
    s.ramp_fraction = ramp_fraction;
    switch (variant) {
        case Variant::mfac:
            s.kind = ScheduleKind::constant;
            s.target = 0.0;
            break;
        case Variant::sa_mfac:
        case Variant::sa_mfac3:
            s.kind = ScheduleKind::constant;
            break;
        case Variant::romfac1:
        case Variant::romfac:
            s.kind = ScheduleKind::repetitive;
            break;
    }
    return s;
}

ScheduleSpec TrainerConfig::epsilon_schedule() const {
    ScheduleSpec s;
    s.target = epsilon_target;
    s.warmup_rounds = warmup_rounds;
    s.loop_rounds = loop_rounds;
    s.loop_count = loop_count;
    s.ramp_fraction = ramp_fraction;
    switch (variant) {
        case Variant::mfac:
            s.kind = ScheduleKind::constant;
            s.target = 0.0;
            break;
        case Variant::sa_mfac:
            s.kind = ScheduleKind::single_ramp;
            break;
        case Variant::sa_mfac3:
            s.kind = ScheduleKind::repetitive;
            break;
        case Variant::romfac1:
        case Variant::romfac:
            s.kind = ScheduleKind::constant;
            break;
    }
    return s;
}

void TrainerConfig::validate() const {
    if (!std::isfinite(mu_target) || mu_target < 0.0)
        throw std::invalid_argument("trainer config: mu target must be finite and >= 0");
    if (!std::isfinite(epsilon_target) || epsilon_target < 0.0)
        throw std::invalid_argument("trainer config: epsilon target must be finite and >= 0");
    mu_schedule().validate();
    epsilon_schedule().validate();
    for (int h : hidden)
        if (h < 1) throw std::invalid_argument("trainer config: hidden widths must be positive");
    if (!std::isfinite(actor_lr) || actor_lr <= 0.0)
        throw std::invalid_argument("trainer config: actor learning rate must be positive");
    if (!std::isfinite(critic_lr) || critic_lr <= 0.0)
        throw std::invalid_argument("trainer config: critic learning rate must be positive");
    if (!std::isfinite(tau_actor) || tau_actor <= 0.0 || tau_actor > 1.0)
        throw std::invalid_argument("trainer config: actor target rate must lie in (0,1]");
    if (!std::isfinite(tau_critic) || tau_critic <= 0.0 || tau_critic > 1.0)
        throw std::invalid_argument("trainer config: critic target rate must lie in (0,1]");
    if (!std::isfinite(gamma) || gamma < 0.0 || gamma >= 1.0)
        throw std::invalid_argument("trainer config: discount must lie in [0,1)");
    if (minibatch < 1) throw std::invalid_argument("trainer config: minibatch must be positive");
    if (buffer_capacity < minibatch)
        throw std::invalid_argument("trainer config: buffer must hold at least one minibatch");
    adversary::AttackConfig atk = attack;
    atk.epsilon = epsilon_target;
    atk.validate();
}

// ---- replay buffer --------------------------------------------------------------

ReplayBuffer::ReplayBuffer(int capacity) : capacity_(capacity) {
    if (capacity < 1) throw std::invalid_argument("replay buffer: capacity must be positive");
}

void ReplayBuffer::push(mfac::Experience exp) {
    exp.validate();
    if (size() < capacity_) {
        slots_.push_back(std::move(exp));
        return;
    }
    slots_[static_cast<std::size_t>(next_)] = std::move(exp);
    next_ = (next_ + 1) % capacity_;
}

const mfac::Experience& ReplayBuffer::at(int index) const {
    if (index < 0 || index >= size())
        throw std::invalid_argument("replay buffer: index out of range");
    return slots_[static_cast<std::size_t>(index)];
}

std::vector<int> ReplayBuffer::sample_indices(int count, std::mt19937_64& rng) const {
    if (count < 1) throw std::invalid_argument("replay buffer: sample count must be positive");
    if (count > size())
        throw std::invalid_argument("replay buffer: sample larger than current contents");
    std::vector<int> pool(static_cast<std::size_t>(size()));
    std::iota(pool.begin(), pool.end(), 0);
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        std::uniform_int_distribution<int> pick(k, size() - 1);
        std::swap(pool[static_cast<std::size_t>(k)], pool[static_cast<std::size_t>(pick(rng))]);
        out.push_back(pool[static_cast<std::size_t>(k)]);
    }
    return out;
}

void ReplayBuffer::save(std::ostream& out) const {
    write_u32(out, static_cast<std::uint32_t>(capacity_));
    write_u32(out, static_cast<std::uint32_t>(size()));
    write_u32(out, static_cast<std::uint32_t>(next_));
    for (const mfac::Experience& e : slots_) write_experience(out, e);
}

ReplayBuffer ReplayBuffer::load(std::istream& in) {
    const std::uint32_t capacity = read_u32(in, "buffer capacity");
    const std::uint32_t count = read_u32(in, "buffer size");
    const std::uint32_t next = read_u32(in, "buffer cursor");
    if (capacity < 1 || count > capacity || next >= capacity)
        throw std::runtime_error("checkpoint load: inconsistent buffer header");
    ReplayBuffer buf(static_cast<int>(capacity));
    buf.next_ = static_cast<int>(next);
    buf.slots_.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) buf.slots_.push_back(read_experience(in));
    return buf;
}

// ---- robust actor objective --------------------------------------------------------

RobustActorLoss robust_actor_loss(const mfac::AgentNets& nets, int agent,
                                  const mfac::Experience& exp, const Tensor& adv_obs, double mu,
                                  std::mt19937_64& rng) {
    if (!std::isfinite(mu) || mu < 0.0)
        throw std::invalid_argument("robust actor loss: mu must be finite and >= 0");
    exp.validate();
    if (agent < 0 || agent >= exp.agent_count() || !exp.has_sample(agent))
        throw std::invalid_argument("robust actor loss: agent has no sample");

    RobustActorLoss out;
    out.actor = diffcore::put_on_tape(out.tape, nets.actor, diffcore::LeafKind::parameter);
    const mfac::SampledActorLoss pg =
        mfac::taped_policy_gradient_loss(out.tape, out.actor, nets, agent, exp, rng);
    out.has_pg = pg.valid;
    out.sampled_action = pg.sampled_action;
    if (pg.valid) {
        out.pg_value = out.tape.value(pg.loss).data[0];
        out.weight = pg.weight;
    }

    if (mu > 0.0) {
        const auto j = static_cast<std::size_t>(agent);
        if (adv_obs.data.size() != exp.obs[j].data.size())
            throw std::invalid_argument("robust actor loss: perturbed observation shape mismatch");
        out.label = adversary::action_label(nets, exp.obs[j], exp.means[j]);
        const ValueId adv = out.tape.constant(adv_obs);
        const ValueId mean = out.tape.constant(exp.means[j]);
        const ValueId ce = adversary::taped_action_loss(out.tape, out.actor, adv, mean, out.label);
        out.action_value = out.tape.value(ce).data[0];
        const ValueId scaled = out.tape.scale(ce, mu);
        out.loss = pg.valid ? out.tape.add(pg.loss, scaled) : scaled;
    } else {
        if (!pg.valid)
            throw std::logic_error(
                "robust actor loss: terminal sample with mu == 0 leaves no objective");
        out.loss = pg.loss;
    }
    return out;
}

// ---- metrics ------------------------------------------------------------------------

void write_metrics_header(std::ostream& out, int team_count) {
    if (team_count < 1) throw std::invalid_argument("metrics: team count must be positive");
    out << "round,mu,epsilon";
    for (int t = 0; t < team_count; ++t) out << ",reward_t" << t;
    for (int t = 0; t < team_count; ++t) out << ",critic_loss_t" << t;
    for (int t = 0; t < team_count; ++t) out << ",actor_loss_t" << t;
    for (int t = 0; t < team_count; ++t) out << ",action_loss_t" << t;
    out << ",steps,updated\n";
}

void append_metrics_row(std::ostream& out, const RoundMetrics& row) {
    const std::size_t teams = row.team_reward.size();
    if (teams == 0 || row.critic_loss.size() != teams || row.actor_loss.size() != teams ||
        row.action_loss.size() != teams)
        throw std::invalid_argument("metrics: malformed row");
    out << row.round << ',';
    format_cell(out, row.mu);
    out << ',';
    format_cell(out, row.epsilon);
    for (double v : row.team_reward) {
        out << ',';
        format_cell(out, v);
    }
    for (double v : row.critic_loss) {
        out << ',';
        format_cell(out, v);
    }
    for (double v : row.actor_loss) {
        out << ',';
        format_cell(out, v);
    }
    for (double v : row.action_loss) {
        out << ',';
        format_cell(out, v);
    }
    out << ',' << row.episode_steps << ',' << (row.updated ? 1 : 0) << '\n';
}

// ---- the training loop ------------------------------------------------------------------

std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

TrainerRun init_run(const TrainerConfig& config, const Env& env, std::uint64_t seed) {
    config.validate();
    const int teams = env.team_count();
    if (teams < 1) throw std::invalid_argument("trainer: environment needs at least one team");
    if (env.agent_count() < 1)
        throw std::invalid_argument("trainer: environment needs at least one agent");
    TrainerRun run;
    run.config = config;
    run.seed = seed;
    run.buffer = ReplayBuffer(config.buffer_capacity);
    run.team_nets.reserve(static_cast<std::size_t>(teams));
    for (int t = 0; t < teams; ++t)
        run.team_nets.push_back(
            mfac::init_agent_nets(env.observation_size(), env.action_count(), config.hidden,
                                  config.activation,
                                  mix_seed(seed ^ mix_seed(0x7465616dull + static_cast<std::uint64_t>(t)))));
    return run;
}

RoundMetrics train_round(TrainerRun& run, Env& env) {
    const TrainerConfig& cfg = run.config;
    cfg.validate();
    const int teams = env.team_count();
    const int n = env.agent_count();
    const int a_count = env.action_count();
    if (static_cast<int>(run.team_nets.size()) != teams)
        throw std::invalid_argument("trainer: run was initialized for a different team count");

    const int m = run.completed_rounds + 1;
    RoundMetrics row;
    row.round = m;
    row.mu = schedule_value(m, cfg.mu_schedule());
    row.epsilon = schedule_value(m, cfg.epsilon_schedule());
    row.team_reward.assign(static_cast<std::size_t>(teams), 0.0);
    row.critic_loss.assign(static_cast<std::size_t>(teams), 0.0);
    row.actor_loss.assign(static_cast<std::size_t>(teams), 0.0);
    row.action_loss.assign(static_cast<std::size_t>(teams), 0.0);

    // every random draw in round m descends from (seed, m) and nothing else
    const std::uint64_t base =
        mix_seed(run.seed + 0x9e3779b97f4a7c15ull * static_cast<std::uint64_t>(m));
    std::mt19937_64 rng(mix_seed(base ^ 0x726f756e64ull));

    // -- collection: one full episode, one stored transition per tick
    env.reset(mix_seed(base ^ 0x657069736f6465ull));
    std::vector<Tensor> prev_mean(static_cast<std::size_t>(n));
    for (auto& t : prev_mean) t = mfac::uniform_distribution(a_count);
    std::vector<int> team_sizes(static_cast<std::size_t>(teams), 0);
    for (int j = 0; j < n; ++j) team_sizes[static_cast<std::size_t>(env.team_of(j))]++;

    while (!env.episode_done()) {
        mfac::Experience exp;
        exp.obs.resize(static_cast<std::size_t>(n));
        exp.actions.assign(static_cast<std::size_t>(n), 0);
        exp.rewards.assign(static_cast<std::size_t>(n), 0.0);
        exp.obs_next.resize(static_cast<std::size_t>(n));
        exp.means.resize(static_cast<std::size_t>(n));
        exp.done.assign(static_cast<std::size_t>(n), 1);
        std::vector<unsigned char> alive(static_cast<std::size_t>(n), 0);
        std::vector<std::vector<int>> hood(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j) {
            const auto k = static_cast<std::size_t>(j);
            if (!env.agent_alive(j)) continue;
            alive[k] = 1;
            exp.obs[k] = env.observe(j);
            hood[k] = env.neighbors(j);
        }
        for (int j = 0; j < n; ++j) {
            const auto k = static_cast<std::size_t>(j);
            if (!alive[k]) continue;
            const Tensor dist = mfac::actor_distribution(
                run.team_nets[static_cast<std::size_t>(env.team_of(j))], exp.obs[k], prev_mean[k],
                false);
            exp.actions[k] = mfac::sample_index(dist, rng);
        }
        const std::vector<double> rewards = env.step(exp.actions);
        const bool over = env.episode_done();
        for (int j = 0; j < n; ++j) {
            const auto k = static_cast<std::size_t>(j);
            if (!alive[k]) continue;
            exp.rewards[k] = rewards[k];
            row.team_reward[static_cast<std::size_t>(env.team_of(j))] += rewards[k];
            std::vector<int> acted;
            acted.reserve(hood[k].size());
            for (int nb : hood[k]) acted.push_back(exp.actions[static_cast<std::size_t>(nb)]);
            exp.means[k] = mfac::mean_action_of(acted, a_count);
            if (env.agent_alive(j) && !over) {
                exp.done[k] = 0;
                exp.obs_next[k] = env.observe(j);
                prev_mean[k] = exp.means[k];
            }
        }
        run.buffer.push(std::move(exp));
        row.episode_steps++;
        if (row.episode_steps > 1000000)
            throw std::domain_error("trainer: episode failed to terminate");
    }
    for (int t = 0; t < teams; ++t) {
        const auto k = static_cast<std::size_t>(t);
        if (team_sizes[k] > 0) row.team_reward[k] /= team_sizes[k];
    }

    // -- update phase, one critic and one actor step per team
    if (run.buffer.size() >= cfg.minibatch) {
        row.updated = true;
        adversary::AttackConfig atk = cfg.attack;
        atk.epsilon = row.epsilon;
        const bool robust = row.mu > 0.0;
        for (int t = 0; t < teams; ++t) {
            mfac::AgentNets& nets = run.team_nets[static_cast<std::size_t>(t)];
            const std::vector<int> picks = run.buffer.sample_indices(cfg.minibatch, rng);
            std::vector<const mfac::Experience*> exps;
            std::vector<int> agents;
            for (int idx : picks) {
                const mfac::Experience& e = run.buffer.at(idx);
                for (int j = 0; j < n; ++j)
                    if (env.team_of(j) == t && e.has_sample(j)) {
                        exps.push_back(&e);
                        agents.push_back(j);
                    }
            }
            if (exps.empty()) continue;
            const int samples = static_cast<int>(exps.size());

            {
                GradientTape tape;
                const TapeNet critic =
                    diffcore::put_on_tape(tape, nets.critic, diffcore::LeafKind::parameter);
                std::vector<ValueId> losses;
                losses.reserve(static_cast<std::size_t>(samples));
                for (int k = 0; k < samples; ++k) {
                    const mfac::Experience& e = *exps[static_cast<std::size_t>(k)];
                    const auto j = static_cast<std::size_t>(agents[static_cast<std::size_t>(k)]);
                    const double y =
                        mfac::td_target(nets, static_cast<int>(j), e, cfg.gamma);
                    losses.push_back(mfac::taped_td_loss(tape, critic, e.obs[j],
                                                         e.actions[j], e.means[j], y));
                }
                const ValueId total = tape.scale(tape.sum(losses), 1.0 / samples);
                row.critic_loss[static_cast<std::size_t>(t)] = tape.value(total).data[0];
                tape.backward(total);
                mfac::sgd_step(nets.critic, tape, critic, cfg.critic_lr);
            }

            {
                std::vector<Tensor> adv(static_cast<std::size_t>(samples));
                std::vector<int> labels(static_cast<std::size_t>(samples), -1);
                if (robust) {
                    std::vector<Tensor> base(static_cast<std::size_t>(samples));
                    std::vector<Tensor> means(static_cast<std::size_t>(samples));
                    for (int k = 0; k < samples; ++k) {
                        const auto kk = static_cast<std::size_t>(k);
                        const auto j = static_cast<std::size_t>(agents[kk]);
                        base[kk] = exps[kk]->obs[j];
                        means[kk] = exps[kk]->means[j];
                    }
                    std::vector<adversary::AdversarialState> hits =
                        adversary::pgd_attack_batch(nets, base, means, atk);
                    for (int k = 0; k < samples; ++k) {
                        const auto kk = static_cast<std::size_t>(k);
                        adv[kk] = std::move(hits[kk].perturbed);
                        labels[kk] = adversary::action_label(nets, base[kk], means[kk]);
                    }
                }
                GradientTape tape;
                const TapeNet actor =
                    diffcore::put_on_tape(tape, nets.actor, diffcore::LeafKind::parameter);
                std::vector<ValueId> pg_terms;
                std::vector<ValueId> ce_terms;
                for (int k = 0; k < samples; ++k) {
                    const auto kk = static_cast<std::size_t>(k);
                    const mfac::SampledActorLoss pg = mfac::taped_policy_gradient_loss(
                        tape, actor, nets, agents[kk], *exps[kk], rng);
                    if (pg.valid) pg_terms.push_back(pg.loss);
                    if (robust) {
                        const auto j = static_cast<std::size_t>(agents[kk]);
                        const ValueId adv_obs = tape.constant(adv[kk]);
                        const ValueId mean_in = tape.constant(exps[kk]->means[j]);
                        ce_terms.push_back(
                            adversary::taped_action_loss(tape, actor, adv_obs, mean_in, labels[kk]));
                    }
                }
                ValueId loss{};
                bool have = false;
                if (!pg_terms.empty()) {
                    loss = tape.scale(tape.sum(pg_terms), 1.0 / pg_terms.size());
                    row.actor_loss[static_cast<std::size_t>(t)] = tape.value(loss).data[0];
                    have = true;
                }
                if (!ce_terms.empty()) {
                    const ValueId ce = tape.scale(tape.sum(ce_terms), 1.0 / ce_terms.size());
                    row.action_loss[static_cast<std::size_t>(t)] = tape.value(ce).data[0];
                    const ValueId scaled = tape.scale(ce, row.mu);
                    loss = have ? tape.add(loss, scaled) : scaled;
                    have = true;
                }
                if (have) {
                    tape.backward(loss);
                    mfac::sgd_step(nets.actor, tape, actor, cfg.actor_lr);
                }
            }

            mfac::soft_update(nets, cfg.tau_actor, cfg.tau_critic);
        }
    }

    run.completed_rounds = m;
    return row;
}

// ---- checkpoints ---------------------------------------------------------------------------

namespace {

constexpr char checkpoint_magic[8] = {'R', 'O', 'M', 'F', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t checkpoint_version = 1;

void write_config(std::ostream& out, const TrainerConfig& c) {
    write_u32(out, static_cast<std::uint32_t>(c.variant));
    write_f64(out, c.mu_target);
    write_f64(out, c.epsilon_target);
    write_u32(out, static_cast<std::uint32_t>(c.warmup_rounds));
    write_u32(out, static_cast<std::uint32_t>(c.loop_rounds));
    write_u32(out, static_cast<std::uint32_t>(c.loop_count));
    write_f64(out, c.ramp_fraction);
    write_u32(out, static_cast<std::uint32_t>(c.hidden.size()));
    for (int h : c.hidden) write_u32(out, static_cast<std::uint32_t>(h));
    write_u32(out, static_cast<std::uint32_t>(c.activation));
    write_f64(out, c.actor_lr);
    write_f64(out, c.critic_lr);
    write_f64(out, c.tau_actor);
    write_f64(out, c.tau_critic);
    write_f64(out, c.gamma);
    write_u32(out, static_cast<std::uint32_t>(c.minibatch));
    write_u32(out, static_cast<std::uint32_t>(c.buffer_capacity));
    write_f64(out, c.attack.epsilon);
    write_f64(out, c.attack.step_size);
    write_u32(out, static_cast<std::uint32_t>(c.attack.steps));
    write_f64(out, c.attack.clip_low);
    write_f64(out, c.attack.clip_high);
}

TrainerConfig read_config(std::istream& in) {
    TrainerConfig c;
    const std::uint32_t variant = read_u32(in, "config");
    if (variant > static_cast<std::uint32_t>(Variant::romfac))
        throw std::runtime_error("checkpoint load: unknown variant");
    c.variant = static_cast<Variant>(variant);
    c.mu_target = read_f64(in, "config");
    c.epsilon_target = read_f64(in, "config");
    c.warmup_rounds = static_cast<int>(read_u32(in, "config"));
    c.loop_rounds = static_cast<int>(read_u32(in, "config"));
    c.loop_count = static_cast<int>(read_u32(in, "config"));
    c.ramp_fraction = read_f64(in, "config");
    const std::uint32_t depth = read_u32(in, "config");
    if (depth > 64) throw std::runtime_error("checkpoint load: implausible network depth");
    c.hidden.clear();
    for (std::uint32_t i = 0; i < depth; ++i)
        c.hidden.push_back(static_cast<int>(read_u32(in, "config")));
    const std::uint32_t act = read_u32(in, "config");
    if (act > static_cast<std::uint32_t>(diffcore::Activation::tanh))
        throw std::runtime_error("checkpoint load: unknown activation");
    c.activation = static_cast<diffcore::Activation>(act);
    c.actor_lr = read_f64(in, "config");
    c.critic_lr = read_f64(in, "config");
    c.tau_actor = read_f64(in, "config");
    c.tau_critic = read_f64(in, "config");
    c.gamma = read_f64(in, "config");
    c.minibatch = static_cast<int>(read_u32(in, "config"));
    c.buffer_capacity = static_cast<int>(read_u32(in, "config"));
    c.attack.epsilon = read_f64(in, "config");
    c.attack.step_size = read_f64(in, "config");
    c.attack.steps = static_cast<int>(read_u32(in, "config"));
    c.attack.clip_low = read_f64(in, "config");
    c.attack.clip_high = read_f64(in, "config");
    return c;
}

}  // namespace

void save_checkpoint(std::ostream& out, const TrainerRun& run) {
    out.write(checkpoint_magic, sizeof checkpoint_magic);
    write_u32(out, checkpoint_version);
    write_config(out, run.config);
    write_u64(out, run.seed);
    write_u32(out, static_cast<std::uint32_t>(run.completed_rounds));
    write_u32(out, static_cast<std::uint32_t>(run.team_nets.size()));
    for (const mfac::AgentNets& nets : run.team_nets) {
        write_u32(out, static_cast<std::uint32_t>(nets.observation_size));
        write_u32(out, static_cast<std::uint32_t>(nets.action_count));
        diffcore::save_net(out, nets.actor);
        diffcore::save_net(out, nets.critic);
        diffcore::save_net(out, nets.target_actor);
        diffcore::save_net(out, nets.target_critic);
    }
    run.buffer.save(out);
    if (!out) throw std::runtime_error("checkpoint save: stream failure");
}

TrainerRun load_checkpoint(std::istream& in) {
    char magic[8];
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, checkpoint_magic, sizeof magic) != 0)
        throw std::runtime_error("checkpoint load: bad magic");
    const std::uint32_t version = read_u32(in, "version");
    if (version != checkpoint_version)
        throw std::runtime_error("checkpoint load: unsupported version");
    TrainerRun run;
    run.config = read_config(in);
    run.config.validate();
    run.seed = read_u64(in, "seed");
    run.completed_rounds = static_cast<int>(read_u32(in, "round counter"));
    const std::uint32_t teams = read_u32(in, "team count");
    if (teams < 1 || teams > 1024) throw std::runtime_error("checkpoint load: implausible team count");
    run.team_nets.clear();
    run.team_nets.reserve(teams);
    for (std::uint32_t t = 0; t < teams; ++t) {
        mfac::AgentNets nets;
        nets.observation_size = static_cast<int>(read_u32(in, "net header"));
        nets.action_count = static_cast<int>(read_u32(in, "net header"));
        nets.actor = diffcore::load_net(in, run.config.activation);
        nets.critic = diffcore::load_net(in, run.config.activation);
        nets.target_actor = diffcore::load_net(in, run.config.activation);
        nets.target_critic = diffcore::load_net(in, run.config.activation);
        run.team_nets.push_back(std::move(nets));
    }
    run.buffer = ReplayBuffer::load(in);
    return run;
}

}  // namespace romfac::trainer
