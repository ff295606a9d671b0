#include "romfac/harness.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "romfac/adversary.hpp"

namespace romfac::harness {

namespace fs = std::filesystem;
using diffcore::Tensor;

namespace {

void cell(std::ostream& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf;
}

std::string describe(const sasg::TabularSaSG& game) {
    std::ostringstream os;
    os << "S=" << game.state_count << " N=" << game.agent_count() << " M=" << game.attacked_count
       << " gamma=" << game.gamma;
    return os.str();
}

}  // namespace

// ---- evaluation protocol -----------------------------------------------------

void EvalConfig::validate(int team_size) const {
    if (team_size < 1) throw std::invalid_argument("evaluation: team size must be positive");
    if (episodes < 1) throw std::invalid_argument("evaluation: episodes must be >= 1");
    if (max_steps < 1) throw std::invalid_argument("evaluation: max steps must be >= 1");
    if (seeds.empty()) throw std::invalid_argument("evaluation: at least one seed required");
    for (int k : attacked_counts)
        if (k < 0 || k > team_size)
            throw std::invalid_argument("evaluation: attacked count " + std::to_string(k) +
                                        " outside [0, " + std::to_string(team_size) + "]");
    attack.validate();
}

EvalConfig eval_config_from(const Config& cfg) {
    EvalConfig e;
    e.episodes = cfg.get_int("eval.episodes", e.episodes);
    e.max_steps = cfg.get_int("eval.max_steps", e.max_steps);
    e.attacked_counts = cfg.get_int_list("eval.attacked", {});
    e.attack.epsilon = cfg.get_double("eval.epsilon", 0.075);
    e.attack.steps = cfg.get_int("eval.attack_steps", 10);
    e.attack.step_size = cfg.get_double("eval.step_size", 0.0);
    e.attack.clip_low = cfg.get_double("eval.clip_low", 0.0);
    e.attack.clip_high = cfg.get_double("eval.clip_high", 1.0);
    const std::string opp = cfg.get_string("eval.opponent", "scripted");
    if (opp == "scripted")
        e.scripted_opponent = true;
    else if (opp == "checkpoint")
        e.scripted_opponent = false;
    else
        throw std::invalid_argument("config: eval.opponent must be 'scripted' or 'checkpoint'");
    e.sample_actions = cfg.get_bool("eval.sample_actions", e.sample_actions);
    e.seeds = cfg.get_u64_list("eval.seeds", e.seeds);
    return e;
}

std::vector<int> standard_attacked_counts(int team_size) {
    if (team_size < 1) throw std::invalid_argument("evaluation: team size must be positive");
    std::vector<int> out;
    for (double f : {0.0, 0.125, 0.25, 0.5, 0.75, 1.0}) {
        const int k = static_cast<int>(std::llround(f * team_size));
        if (out.empty() || out.back() != k) out.push_back(k);
    }
    return out;
}

int scripted_action(const gridworld::WorldState& state, int agent_id) {
    if (agent_id < 0 || agent_id >= static_cast<int>(state.agents.size()))
        throw std::invalid_argument("scripted action: unknown agent");
    const gridworld::Agent& self = state.agent(agent_id);
    if (!self.alive) throw std::invalid_argument("scripted action: agent is dead");

    int best = -1;
    int best_dist = INT_MAX;
    for (const gridworld::Agent& other : state.agents) {
        if (!other.alive || other.team == self.team) continue;
        const int d = std::abs(other.x - self.x) + std::abs(other.y - self.y);
        if (d < best_dist) {
            best_dist = d;
            best = other.id;
        }
    }
    if (best < 0) return gridworld::act_noop;
    const gridworld::Agent& target = state.agent(best);
    const int dx = target.x - self.x;
    const int dy = target.y - self.y;

    if (state.config.scenario == gridworld::Scenario::pursuit && self.team == 1) {
        // prey: step wherever the nearest predator ends up farthest
        int best_action = gridworld::act_noop;
        int best_gain = std::abs(dx) + std::abs(dy);
        for (int a : {gridworld::act_move_n, gridworld::act_move_s, gridworld::act_move_w,
                      gridworld::act_move_e}) {
            const int nx = self.x + gridworld::action_dx(a);
            const int ny = self.y + gridworld::action_dy(a);
            if (nx < 0 || nx >= state.config.width || ny < 0 || ny >= state.config.height)
                continue;
            const int d = std::abs(target.x - nx) + std::abs(target.y - ny);
            if (d > best_gain) {
                best_gain = d;
                best_action = a;
            }
        }
        return best_action;
    }

    if (std::abs(dx) + std::abs(dy) == 1) {
        if (dx == 1) return gridworld::act_attack_e;
        if (dx == -1) return gridworld::act_attack_w;
        return dy == 1 ? gridworld::act_attack_s : gridworld::act_attack_n;
    }
    // close the larger gap first; ties go east-west
    if (std::abs(dx) >= std::abs(dy) && dx != 0)
        return dx > 0 ? gridworld::act_move_e : gridworld::act_move_w;
    if (dy != 0) return dy > 0 ? gridworld::act_move_s : gridworld::act_move_n;
    return gridworld::act_noop;
}

MetricsRow aggregate_records(const std::string& variant, int attacked_count,
                             std::vector<EpisodeRecord> records,
                             const std::vector<std::uint64_t>& seeds) {
    if (records.empty()) throw std::invalid_argument("aggregation: no episode records");
    std::sort(records.begin(), records.end(), [](const EpisodeRecord& a, const EpisodeRecord& b) {
        return a.seed != b.seed ? a.seed < b.seed : a.episode < b.episode;
    });
    MetricsRow row;
    row.variant = variant;
    row.attacked_count = attacked_count;
    row.seeds = seeds;
    const double n = static_cast<double>(records.size());
    double wins = 0.0, kills = 0.0, reward = 0.0;
    for (const EpisodeRecord& r : records) {
        wins += r.win ? 1.0 : 0.0;
        kills += r.kills;
        reward += r.total_reward;
    }
    row.winning_rate = wins / n;
    row.avg_kill = kills / n;
    row.avg_total_reward = reward / n;
    double ss = 0.0;
    for (const EpisodeRecord& r : records) {
        const double d = r.total_reward - row.avg_total_reward;
        ss += d * d;
    }
    row.std_total_reward = std::sqrt(std::max(0.0, ss / n));
    return row;
}

namespace {

EpisodeRecord rollout(trainer::GridEnv& env, const trainer::TrainerRun& run, int attacked,
                      const adversary::AttackConfig& atk, bool scripted, bool sample,
                      std::uint64_t episode_seed) {
    const int n = env.agent_count();
    const int a_count = env.action_count();
    env.reset(episode_seed);
    // action draws come from their own stream so the environment's randomness
    // stays untouched; the stream depends only on the episode seed, never on
    // the attacked count, so attacked and clean sweeps share their draws
    std::mt19937_64 action_rng(trainer::mix_seed(episode_seed ^ 0x73616d706c65ULL));
    const auto choose = [&](const Tensor& dist) {
        return sample ? mfac::sample_index(dist, action_rng) : mfac::argmax_index(dist);
    };
    std::vector<Tensor> prev_mean(static_cast<std::size_t>(n));
    for (Tensor& t : prev_mean) t = mfac::uniform_distribution(a_count);

    EpisodeRecord rec;
    while (!env.episode_done()) {
        std::vector<unsigned char> alive(static_cast<std::size_t>(n), 0);
        std::vector<std::vector<int>> hood(static_cast<std::size_t>(n));
        std::vector<int> actions(static_cast<std::size_t>(n), gridworld::act_noop);
        for (int j = 0; j < n; ++j) {
            if (!env.agent_alive(j)) continue;
            const auto k = static_cast<std::size_t>(j);
            alive[k] = 1;
            hood[k] = env.neighbors(j);
        }
        for (int j = 0; j < n; ++j) {
            const auto k = static_cast<std::size_t>(j);
            if (!alive[k]) continue;
            if (env.team_of(j) == 0) {
                Tensor obs = env.observe(j);
                if (j < attacked)
                    obs = adversary::pgd_attack(run.team_nets[0], obs, prev_mean[k], atk)
                              .perturbed;
                actions[k] =
                    choose(mfac::actor_distribution(run.team_nets[0], obs, prev_mean[k], false));
            } else if (scripted) {
                actions[k] = scripted_action(env.world(), j);
            } else {
                actions[k] = choose(mfac::actor_distribution(run.team_nets[1], env.observe(j),
                                                             prev_mean[k], false));
            }
        }
        const std::vector<double> rewards = env.step(actions);
        for (int j = 0; j < n; ++j) {
            const auto k = static_cast<std::size_t>(j);
            if (!alive[k]) continue;
            if (env.team_of(j) == 0) rec.total_reward += rewards[k];
            if (env.agent_alive(j)) {
                std::vector<int> acted;
                acted.reserve(hood[k].size());
                for (int nb : hood[k]) acted.push_back(actions[static_cast<std::size_t>(nb)]);
                prev_mean[k] = mfac::mean_action_of(acted, a_count);
            }
        }
        rec.steps++;
        if (rec.steps > 1000000)
            throw std::domain_error("evaluation: episode failed to terminate");
    }
    rec.win = gridworld::episode_outcome(env.world()) == gridworld::Outcome::team_a_win;
    for (int j = 0; j < n; ++j)
        if (env.team_of(j) == 1 && !env.agent_alive(j)) rec.kills++;
    return rec;
}

}  // namespace

EvalOutput run_evaluation(const trainer::TrainerRun& run, gridworld::EnvConfig env_config,
                          const EvalConfig& eval) {
    if (run.team_nets.size() != 2)
        throw std::invalid_argument("evaluation: checkpoint holds " +
                                    std::to_string(run.team_nets.size()) +
                                    " team networks, the grid scenarios need 2");
    env_config.max_steps = eval.max_steps;
    env_config.validate();
    if (run.team_nets[0].observation_size != gridworld::observation_size(env_config))
        throw std::invalid_argument(
            "evaluation: checkpoint does not match the scenario (observation size " +
            std::to_string(run.team_nets[0].observation_size) + " vs " +
            std::to_string(gridworld::observation_size(env_config)) + ")");
    if (run.team_nets[0].action_count != gridworld::action_count)
        throw std::invalid_argument("evaluation: checkpoint action count mismatch");
    eval.validate(env_config.team_a_size);

    const std::vector<int> counts = eval.attacked_counts.empty()
                                        ? standard_attacked_counts(env_config.team_a_size)
                                        : eval.attacked_counts;
    trainer::GridEnv env(env_config);
    const std::string variant = trainer::variant_name(run.config.variant);

    EvalOutput out;
    for (int k : counts) {
        std::vector<EpisodeRecord> records;
        records.reserve(eval.seeds.size() * static_cast<std::size_t>(eval.episodes));
        for (std::uint64_t seed : eval.seeds) {
            for (int ep = 0; ep < eval.episodes; ++ep) {
                // the same per-episode seed for every attacked count
                const std::uint64_t episode_seed =
                    trainer::mix_seed(trainer::mix_seed(seed) ^ static_cast<std::uint64_t>(ep));
                EpisodeRecord rec = rollout(env, run, k, eval.attack, eval.scripted_opponent,
                                            eval.sample_actions, episode_seed);
                rec.attacked = k;
                rec.seed = seed;
                rec.episode = ep;
                records.push_back(rec);
            }
        }
        out.rows.push_back(aggregate_records(variant, k, records, eval.seeds));
        out.records.insert(out.records.end(), records.begin(), records.end());
    }
    return out;
}

void write_eval_metrics_csv(std::ostream& out, const std::vector<MetricsRow>& rows) {
    out << "variant,attacked,winning_rate,avg_kill,avg_total_reward,std_total_reward,seeds\n";
    for (const MetricsRow& r : rows) {
        out << r.variant << ',' << r.attacked_count << ',';
        cell(out, r.winning_rate);
        out << ',';
        cell(out, r.avg_kill);
        out << ',';
        cell(out, r.avg_total_reward);
        out << ',';
        cell(out, r.std_total_reward);
        out << ',';
        for (std::size_t i = 0; i < r.seeds.size(); ++i)
            out << (i ? "|" : "") << r.seeds[i];
        out << '\n';
    }
}

void write_episode_csv(std::ostream& out, const std::vector<EpisodeRecord>& records) {
    out << "attacked,seed,episode,steps,win,kills,total_reward\n";
    for (const EpisodeRecord& r : records) {
        out << r.attacked << ',' << r.seed << ',' << r.episode << ',' << r.steps << ','
            << (r.win ? 1 : 0) << ',' << r.kills << ',';
        cell(out, r.total_reward);
        out << '\n';
    }
}

// ---- orchestration ----------------------------------------------------------------

TrainingArtifacts run_training(const Config& cfg, const std::string& out_dir,
                               std::ostream* progress) {
    const gridworld::EnvConfig env_config = env_config_from(cfg);
    const trainer::TrainerConfig tcfg = trainer_config_from(cfg);
    const std::uint64_t seed = cfg.get_u64("train.seed", 1);
    cfg.reject_unknown({"env", "train", "attack"});

    fs::create_directories(out_dir);
    trainer::GridEnv env(env_config);
    trainer::TrainerRun run = trainer::init_run(tcfg, env, seed);
    const int rounds = tcfg.total_rounds();

    TrainingArtifacts art;
    art.variant = trainer::variant_name(tcfg.variant);
    art.seed = seed;
    art.rounds = rounds;
    const std::string base = art.variant + "_s" + std::to_string(seed);
    art.metrics_path = (fs::path(out_dir) / ("train_" + base + ".csv")).string();
    art.checkpoint_path = (fs::path(out_dir) / ("checkpoint_" + base + ".bin")).string();
    art.summary_path = (fs::path(out_dir) / ("train_" + base + ".json")).string();

    std::ofstream csv(art.metrics_path);
    if (!csv) throw std::runtime_error("training: cannot write " + art.metrics_path);
    trainer::write_metrics_header(csv, env.team_count());
    trainer::RoundMetrics last;
    for (int m = 1; m <= rounds; ++m) {
        last = trainer::train_round(run, env);
        trainer::append_metrics_row(csv, last);
        if (progress && (m % std::max(1, rounds / 10) == 0 || m == rounds))
            *progress << art.variant << " round " << m << "/" << rounds << " team0 reward "
                      << last.team_reward[0] << "\n";
    }
    csv.close();
    if (!csv) throw std::runtime_error("training: failed writing " + art.metrics_path);

    std::ofstream ckpt(art.checkpoint_path, std::ios::binary);
    if (!ckpt) throw std::runtime_error("training: cannot write " + art.checkpoint_path);
    trainer::save_checkpoint(ckpt, run);
    ckpt.close();
    if (!ckpt) throw std::runtime_error("training: failed writing " + art.checkpoint_path);

    nlohmann::json j;
    j["variant"] = art.variant;
    j["seed"] = seed;
    j["rounds"] = rounds;
    j["final"] = {{"mu", last.mu},
                  {"epsilon", last.epsilon},
                  {"team_reward", last.team_reward},
                  {"critic_loss", last.critic_loss},
                  {"actor_loss", last.actor_loss},
                  {"action_loss", last.action_loss}};
    j["metrics_csv"] = art.metrics_path;
    j["checkpoint"] = art.checkpoint_path;
    std::ofstream js(art.summary_path);
    if (!js) throw std::runtime_error("training: cannot write " + art.summary_path);
    js << j.dump(2) << "\n";
    return art;
}

EvaluationArtifacts run_evaluation_files(const std::string& checkpoint_path, const Config& cfg,
                                         const std::string& out_dir) {
    std::ifstream in(checkpoint_path, std::ios::binary);
    if (!in) throw std::runtime_error("evaluate: cannot open checkpoint '" + checkpoint_path + "'");
    const trainer::TrainerRun run = trainer::load_checkpoint(in);

    const gridworld::EnvConfig env_config = env_config_from(cfg);
    const EvalConfig eval = eval_config_from(cfg);
    cfg.reject_unknown({"env", "eval"});

    EvaluationArtifacts art;
    art.variant = trainer::variant_name(run.config.variant);
    art.train_seed = run.seed;
    art.output = run_evaluation(run, env_config, eval);

    fs::create_directories(out_dir);
    const std::string base = art.variant + "_s" + std::to_string(run.seed);
    art.metrics_path = (fs::path(out_dir) / ("eval_" + base + ".csv")).string();
    art.episodes_path = (fs::path(out_dir) / ("eval_" + base + "_episodes.csv")).string();
    art.summary_path = (fs::path(out_dir) / ("eval_" + base + ".json")).string();

    std::ofstream metrics(art.metrics_path);
    if (!metrics) throw std::runtime_error("evaluate: cannot write " + art.metrics_path);
    write_eval_metrics_csv(metrics, art.output.rows);

    std::ofstream episodes(art.episodes_path);
    if (!episodes) throw std::runtime_error("evaluate: cannot write " + art.episodes_path);
    write_episode_csv(episodes, art.output.records);

    nlohmann::json j;
    j["variant"] = art.variant;
    j["train_seed"] = run.seed;
    j["episodes_per_cell"] = eval.episodes;
    j["max_steps"] = eval.max_steps;
    j["opponent"] = eval.scripted_opponent ? "scripted" : "checkpoint";
    j["action_choice"] = eval.sample_actions ? "sample" : "greedy";
    j["attack"] = {{"epsilon", eval.attack.epsilon}, {"steps", eval.attack.steps}};
    j["seeds"] = eval.seeds;
    j["rows"] = nlohmann::json::array();
    for (const MetricsRow& r : art.output.rows)
        j["rows"].push_back({{"attacked", r.attacked_count},
                             {"winning_rate", r.winning_rate},
                             {"avg_kill", r.avg_kill},
                             {"avg_total_reward", r.avg_total_reward},
                             {"std_total_reward", r.std_total_reward}});
    std::ofstream js(art.summary_path);
    if (!js) throw std::runtime_error("evaluate: cannot write " + art.summary_path);
    js << j.dump(2) << "\n";
    return art;
}

// ---- verification entry points ---------------------------------------------------------

namespace {

bool contraction_holds(const sasg::TabularSaSG& game, const sasg::TabularPolicy& pi, int agent,
                       std::mt19937_64& rng) {
    const sasg::Perturbation others = sasg::Perturbation::identity(game);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<double> v(static_cast<std::size_t>(game.state_count));
        std::vector<double> w(static_cast<std::size_t>(game.state_count));
        for (double& x : v) x = u(rng);
        for (double& x : w) x = u(rng);
        const sasg::BellmanResult lv = sasg::bellman_step(game, pi, agent, others, v);
        const sasg::BellmanResult lw = sasg::bellman_step(game, pi, agent, others, w);
        double num = 0.0, den = 0.0;
        for (int s = 0; s < game.state_count; ++s) {
            const auto i = static_cast<std::size_t>(s);
            num = std::max(num, std::abs(lv.values[i] - lw.values[i]));
            den = std::max(den, std::abs(v[i] - w[i]));
        }
        if (num > game.gamma * den + 1e-12) return false;
    }
    return true;
}

bool fixed_point_holds(const sasg::TabularSaSG& game, const sasg::TabularPolicy& pi, int agent) {
    const sasg::Perturbation others = sasg::Perturbation::identity(game);
    const sasg::AdversaryResult adv = sasg::optimal_adversary(game, pi, agent, others);
    const sasg::BellmanResult step = sasg::bellman_step(game, pi, agent, others, adv.values);
    for (int s = 0; s < game.state_count; ++s)
        if (std::abs(step.values[static_cast<std::size_t>(s)] -
                     adv.values[static_cast<std::size_t>(s)]) > 1e-9)
            return false;
    return true;
}

double profile_space(const sasg::TabularSaSG& game) {
    double total = 1.0;
    for (int j = 0; j < game.agent_count(); ++j)
        total *= std::pow(static_cast<double>(game.action_counts[static_cast<std::size_t>(j)]),
                          game.state_count);
    return total;
}

}  // namespace

SasgVerifyReport run_sasg_verify(const SasgVerifyOptions& opt, std::ostream* log) {
    SasgVerifyReport rep;
    auto note = [&](const std::string& line) {
        rep.lines.push_back(line);
        if (log) *log << line << "\n";
    };
    auto check = [&](bool ok, const std::string& what) {
        rep.checks++;
        if (!ok) rep.failures++;
        note(std::string(ok ? "PASS " : "FAIL ") + what);
        return ok;
    };

    if (!opt.fixtures_dir.empty()) {
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(opt.fixtures_dir))
            if (entry.path().extension() == ".sasg") files.push_back(entry.path());
        std::sort(files.begin(), files.end());
        if (files.empty()) note("no .sasg fixtures under " + opt.fixtures_dir);
        int index = 0;
        for (const fs::path& path : files) {
            const std::string name = path.filename().string();
            sasg::GameFixture fx;
            try {
                std::ifstream in(path);
                if (!in) throw std::runtime_error("cannot open file");
                fx = sasg::load_fixture(in);
            } catch (const std::exception& e) {
                check(false, "fixture " + name + ": " + e.what());
                ++index;
                continue;
            }
            check(true, "fixture " + name + ": loads (" + describe(fx.game) + ")");
            std::mt19937_64 rng(trainer::mix_seed(opt.seed + static_cast<std::uint64_t>(index)));
            if (fx.policy) {
                for (int j = 0; j < fx.game.attacked_count; ++j) {
                    const std::string tag = "fixture " + name + " agent " + std::to_string(j);
                    check(contraction_holds(fx.game, *fx.policy, j, rng), tag + ": contraction");
                    check(fixed_point_holds(fx.game, *fx.policy, j), tag + ": fixed point");
                    const sasg::CertificateReport cert =
                        sasg::value_drop_certificate(fx.game, *fx.policy, j);
                    std::ostringstream os;
                    os << tag << ": value-drop bound (lhs=" << cert.lhs << " rhs=" << cert.rhs;
                    if (cert.lhs > 1e-6) os << " ratio=" << cert.rhs / cert.lhs;
                    os << ")";
                    check(cert.holds, os.str());
                }
            } else if (profile_space(fx.game) <= static_cast<double>(opt.nash_profile_budget)) {
                const sasg::NashScanReport a = sasg::nash_existence_scan(fx.game);
                const sasg::NashScanReport b = sasg::nash_existence_scan(fx.game);
                const bool deterministic = a.equilibrium_found == b.equilibrium_found &&
                                           a.equilibria_count == b.equilibria_count &&
                                           a.undecided_profiles == b.undecided_profiles &&
                                           a.inconclusive_profiles == b.inconclusive_profiles;
                check(deterministic, "fixture " + name + ": equilibrium scan deterministic");
                std::ostringstream os;
                os << "  fixture " << name << ": " << a.equilibria_count << " equilibria among "
                   << a.profiles_total << " deterministic profiles (undecided "
                   << a.undecided_profiles << ", inconclusive " << a.inconclusive_profiles << ")";
                note(os.str());
            } else {
                note("fixture " + name + ": equilibrium scan skipped (profile space too large)");
            }
            ++index;
        }
    }

    if (opt.sweep_games > 0) {
        std::mt19937_64 rng(opt.seed);
        int contraction_fail = 0, fixed_fail = 0, cert_fail = 0, undecided = 0;
        int certified = 0;
        double loosest = 0.0, tightest = std::numeric_limits<double>::infinity();
        sasg::GameFixture loose_fx, tight_fx;
        for (int g = 0; g < opt.sweep_games; ++g) {
            const sasg::TabularSaSG game = sasg::random_game(rng, opt.spec);
            const sasg::TabularPolicy pi = sasg::random_policy(rng, game);
            for (int j = 0; j < game.attacked_count; ++j) {
                if (!contraction_holds(game, pi, j, rng)) contraction_fail++;
                if (!fixed_point_holds(game, pi, j)) fixed_fail++;
                sasg::CertificateReport cert;
                try {
                    cert = sasg::value_drop_certificate(game, pi, j);
                } catch (const std::domain_error&) {
                    undecided++;
                    continue;
                }
                certified++;
                if (!cert.holds) cert_fail++;
                if (cert.lhs > 1e-6) {
                    const double ratio = cert.rhs / cert.lhs;
                    if (ratio > loosest) {
                        loosest = ratio;
                        loose_fx = {game, pi};
                    }
                    if (ratio < tightest) {
                        tightest = ratio;
                        tight_fx = {game, pi};
                    }
                }
            }
        }
        const std::string scope = std::to_string(opt.sweep_games) + " random games";
        check(contraction_fail == 0, "sweep: contraction holds on " + scope);
        check(fixed_fail == 0, "sweep: adversary values are Bellman fixed points on " + scope);
        check(cert_fail == 0,
              "sweep: value-drop bound holds on all " + std::to_string(certified) +
                  " certified (game, agent) pairs");
        if (undecided > 0)
            note("sweep: " + std::to_string(undecided) + " pairs skipped (joint adversary undecided)");
        if (std::isfinite(tightest)) {
            std::ostringstream os;
            os << "sweep: certificate ratio rhs/lhs ranges [" << tightest << ", " << loosest
               << "]";
            note(os.str());
        }
        if (!opt.dump_dir.empty()) {
            if (!std::isfinite(tightest)) {
                check(false, "dump: sweep produced no certificates with a meaningful drop");
            } else {
                fs::create_directories(opt.dump_dir);
                const std::string loose_path =
                    (fs::path(opt.dump_dir) / "bound_loose.sasg").string();
                const std::string tight_path =
                    (fs::path(opt.dump_dir) / "bound_tight.sasg").string();
                std::ofstream lo(loose_path);
                sasg::save_fixture(lo, loose_fx.game, &*loose_fx.policy);
                std::ofstream ti(tight_path);
                sasg::save_fixture(ti, tight_fx.game, &*tight_fx.policy);
                std::ostringstream os;
                os << "dump: wrote " << loose_path << " (ratio " << loosest << ") and "
                   << tight_path << " (ratio " << tightest << ")";
                note(os.str());
            }
        }
    }

    note((rep.failures == 0 ? "all " : "") + std::to_string(rep.checks) + " checks, " +
         std::to_string(rep.failures) + " failures");
    return rep;
}

bool search_nash_counterexample(std::uint64_t seed, int max_tries, const std::string& out_path,
                                std::ostream* log) {
    std::mt19937_64 rng(seed);
    sasg::RandomGameSpec spec;
    spec.min_states = 2;
    spec.max_states = 2;
    spec.min_agents = 2;
    spec.max_agents = 2;
    spec.min_actions = 2;
    spec.max_actions = 2;
    spec.max_views = 2;
    for (int t = 0; t < max_tries; ++t) {
        const sasg::TabularSaSG game = sasg::random_game(rng, spec);
        const sasg::NashScanReport scan = sasg::nash_existence_scan(game);
        if (!scan.equilibrium_found && scan.undecided_profiles == 0 &&
            scan.inconclusive_profiles == 0) {
            std::ofstream out(out_path);
            if (!out) throw std::runtime_error("cannot write " + out_path);
            sasg::save_fixture(out, game);
            if (log)
                *log << "no-equilibrium game found after " << (t + 1) << " draws -> " << out_path
                     << " (" << scan.profiles_total << " profiles)\n";
            return true;
        }
    }
    if (log) *log << "no counterexample among " << max_tries << " games\n";
    return false;
}

}  // namespace romfac::harness
