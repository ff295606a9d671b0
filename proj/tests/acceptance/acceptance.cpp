// Acceptance gate: ten checks covering gradient correctness, schedule shape,
// the tabular game theory, trained-policy robustness, and output determinism.
// Each check prints exactly one PASS/FAIL line; the exit code is the number
// of failed checks. Training for the robustness checks happens once and is
// shared; tolerances and budgets are pinned here, next to the checks.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "romfac/adversary.hpp"
#include "romfac/config.hpp"
#include "romfac/env.hpp"
#include "romfac/gradcheck.hpp"
#include "romfac/harness.hpp"
#include "romfac/mfac.hpp"
#include "romfac/sasg.hpp"
#include "romfac/schedule.hpp"
#include "romfac/tape.hpp"
#include "romfac/trainer.hpp"

#ifndef ACCEPTANCE_ROOT
#error "ACCEPTANCE_ROOT must point at the repository root"
#endif

namespace fs = std::filesystem;
using namespace romfac;

namespace {

// ---- pinned tolerances and budgets -------------------------------------------

constexpr double grad_rel_tol = 1e-4;          // finite-difference agreement
constexpr double ce_softmax_tol = 1e-10;       // closed-form softmax gradient
constexpr double schedule_tol = 1e-12;         // independent schedule re-evaluation
constexpr double fixed_point_tol = 1e-8;       // Bellman fixed point vs exhaustive minimum
constexpr double contraction_slack = 1e-12;    // numeric slack on the contraction inequality
constexpr double certificate_tol = 1e-9;       // value-drop bound slack
constexpr double loose_ratio_min = 10.0;       // committed loose-bound fixture
constexpr double tight_ratio_max = 2.0;        // committed tight-bound fixture
constexpr double attack_drop_min = 0.20;       // attacked reward must drop by this share
constexpr double robust_gain_min = 0.15;       // robust vs plain under attack, pooled
constexpr double clean_retention_min = 0.90;   // robust clean vs plain clean, pooled

constexpr double budget_gradients_s = 10.0;
constexpr double budget_schedule_s = 1.0;
constexpr double budget_contraction_s = 60.0;
constexpr double budget_certificate_s = 60.0;
constexpr double budget_attack_s = 3600.0;
constexpr double budget_robust_gain_s = 7200.0;
constexpr double budget_no_equilibrium_s = 120.0;

const std::string repo_root = ACCEPTANCE_ROOT;

struct Failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& msg) {
    if (!ok) throw Failure(msg);
}

std::string fmt(double v, int precision = 4) {
    std::ostringstream os;
    os.precision(precision);
    os << v;
    return os.str();
}

// ---- shared game sweep (checks 3 and 4 use the same instances) ----------------

struct SweptGame {
    sasg::TabularSaSG game;
    sasg::TabularPolicy policy;
};

const std::vector<SweptGame>& game_sweep() {
    static const std::vector<SweptGame> games = [] {
        std::vector<SweptGame> out;
        std::mt19937_64 rng(424242);
        out.reserve(100);
        for (int i = 0; i < 100; ++i) {
            SweptGame g;
            g.game = sasg::random_game(rng);
            g.policy = sasg::random_policy(rng, g.game);
            out.push_back(std::move(g));
        }
        return out;
    }();
    return games;
}

// ---- shared trained variants (checks 5 through 8) ------------------------------

struct VariantResults {
    std::vector<double> clean_by_seed;     // mean total reward, no attacked agents
    std::vector<double> attacked_by_seed;  // mean total reward, whole team attacked
    double clean_pool = 0.0;
    double attacked_pool = 0.0;
    double train_seconds = 0.0;
};

class Lab {
public:
    const VariantResults& results(const std::string& variant) {
        auto it = cache_.find(variant);
        if (it != cache_.end()) return it->second;
        return cache_.emplace(variant, train_and_evaluate(variant)).first->second;
    }

private:
    static constexpr std::uint64_t train_seeds[3] = {1, 2, 3};

    VariantResults train_and_evaluate(const std::string& variant) const {
        const auto t0 = std::chrono::steady_clock::now();
        const auto cfg =
            harness::Config::parse_file(repo_root + "/configs/accept_" + variant + ".ini");
        const gridworld::EnvConfig env_config = harness::env_config_from(cfg);
        const trainer::TrainerConfig tcfg = harness::trainer_config_from(cfg);

        harness::EvalConfig eval;
        eval.episodes = 20;
        eval.max_steps = env_config.max_steps;
        eval.attacked_counts = {0, env_config.team_a_size};
        eval.attack.epsilon = 0.075;  // evaluation attack radius, fixed across variants
        eval.attack.steps = 10;
        eval.scripted_opponent = false;  // both teams play the networks they trained
        eval.seeds = {101, 102, 103};

        VariantResults out;
        double clean_sum = 0.0, attacked_sum = 0.0;
        for (std::uint64_t seed : train_seeds) {
            trainer::GridEnv env(env_config);
            trainer::TrainerRun run = trainer::init_run(tcfg, env, seed);
            for (int m = 1; m <= tcfg.total_rounds(); ++m) trainer::train_round(run, env);
            const harness::EvalOutput ev = harness::run_evaluation(run, env_config, eval);
            out.clean_by_seed.push_back(ev.rows[0].avg_total_reward);
            out.attacked_by_seed.push_back(ev.rows[1].avg_total_reward);
            clean_sum += ev.rows[0].avg_total_reward;
            attacked_sum += ev.rows[1].avg_total_reward;
        }
        out.clean_pool = clean_sum / 3.0;
        out.attacked_pool = attacked_sum / 3.0;
        out.train_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                                .count();
        return out;
    }

    std::map<std::string, VariantResults> cache_;
};

Lab lab;

// ---- checks -------------------------------------------------------------------

std::string check_gradients() {
    const auto rep = diffcore::run_gradcheck_suite(100, 42);
    require(rep.cases == 100, "expected 100 gradient cases, ran " + std::to_string(rep.cases));
    require(rep.pass(), "finite-difference failures: " + rep.first_failure);
    require(rep.max_rel_error <= grad_rel_tol,
            "max relative error " + fmt(rep.max_rel_error) + " above " + fmt(grad_rel_tol));

    // closed form: d/dz CE(softmax(z), y) = softmax(z) - onehot(y)
    std::mt19937_64 rng(7);
    std::normal_distribution<double> logit(0.0, 3.0);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 11);
        diffcore::Tensor z = diffcore::Tensor::zeros({n});
        for (double& v : z.data) v = logit(rng);
        const int label = static_cast<int>(rng() % static_cast<std::uint64_t>(n));

        double mx = z.data[0];
        for (double v : z.data) mx = std::max(mx, v);
        std::vector<double> probs(static_cast<std::size_t>(n));
        double sum = 0.0;
        for (int i = 0; i < n; ++i) sum += probs[static_cast<std::size_t>(i)] =
                                        std::exp(z.data[static_cast<std::size_t>(i)] - mx);
        for (double& p : probs) p /= sum;

        diffcore::GradientTape tape;
        const auto zid = tape.leaf(z, diffcore::LeafKind::input);
        const auto loss = tape.cross_entropy(tape.softmax(zid), label);
        tape.backward(loss);
        const diffcore::Tensor& grad = tape.gradient(zid);
        for (int i = 0; i < n; ++i) {
            const double expected =
                probs[static_cast<std::size_t>(i)] - (i == label ? 1.0 : 0.0);
            worst = std::max(worst, std::abs(grad.data[static_cast<std::size_t>(i)] - expected));
        }
    }
    require(worst <= ce_softmax_tol,
            "softmax gradient deviates from closed form by " + fmt(worst));
    return "100 cases, max rel err " + fmt(rep.max_rel_error) + ", softmax closed form within " +
           fmt(worst, 3);
}

// Straight-line re-evaluation of the sawtooth: within each loop the value
// rises linearly from the loop's first round and is cut to zero on the
// loop's last round; the warmup stays at zero.
double sawtooth_oracle(int round, int warmup, int loop_rounds, double ramp_fraction,
                       double target) {
    if (round <= warmup) return 0.0;
    int pos = (round - warmup) % loop_rounds;  // 1..loop-1, with 0 for the loop's last round
    if (pos == 0) return 0.0;
    const double rise_len = ramp_fraction * loop_rounds;
    if (static_cast<double>(pos) >= rise_len) return target;
    return target * (static_cast<double>(pos) / rise_len);
}

std::string check_schedule() {
    std::mt19937_64 rng(1234);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 10000; ++trial) {
        trainer::ScheduleSpec spec;
        spec.kind = trainer::ScheduleKind::repetitive;
        spec.warmup_rounds = 1 + static_cast<int>(rng() % 50);
        spec.loop_rounds = 1 + static_cast<int>(rng() % 60);
        spec.loop_count = 1 + static_cast<int>(rng() % 8);
        spec.ramp_fraction = std::max(1e-3, unit(rng));
        spec.target = 2.0 * unit(rng);
        const int m = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(
                                               spec.total_rounds()));
        const double got = trainer::schedule_value(m, spec);
        const double want = sawtooth_oracle(m, spec.warmup_rounds, spec.loop_rounds,
                                            spec.ramp_fraction, spec.target);
        worst = std::max(worst, std::abs(got - want));
        require(std::abs(got - want) <= schedule_tol * std::max(1.0, spec.target),
                "round " + std::to_string(m) + ": schedule " + fmt(got, 17) + " vs oracle " +
                    fmt(want, 17));
    }

    // the sawtooth touches zero on every loop boundary
    std::size_t zeros = 0;
    for (int trial = 0; trial < 100; ++trial) {
        trainer::ScheduleSpec spec;
        spec.kind = trainer::ScheduleKind::repetitive;
        spec.warmup_rounds = 1 + static_cast<int>(rng() % 20);
        spec.loop_rounds = 2 + static_cast<int>(rng() % 30);
        spec.loop_count = 1 + static_cast<int>(rng() % 6);
        spec.ramp_fraction = std::max(1e-3, unit(rng));
        spec.target = 0.1 + unit(rng);
        for (int k = 1; k <= spec.loop_count; ++k) {
            const int boundary = spec.warmup_rounds + k * spec.loop_rounds;
            require(trainer::schedule_value(boundary, spec) == 0.0,
                    "nonzero value at loop boundary round " + std::to_string(boundary));
            ++zeros;
        }
    }
    return "10000 sampled rounds match the oracle (max dev " + fmt(worst, 3) + "), " +
           std::to_string(zeros) + " loop boundaries at zero";
}

std::string check_contraction_and_fixed_point() {
    std::mt19937_64 rng(5150);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    int pairs = 0, agents_checked = 0;
    double worst_gap = 0.0;
    for (const SweptGame& sw : game_sweep()) {
        const sasg::Perturbation identity = sasg::Perturbation::identity(sw.game);
        for (int j = 0; j < sw.game.attacked_count; ++j) {
            // gamma-contraction on random vector pairs
            for (int trial = 0; trial < 5; ++trial) {
                std::vector<double> v(static_cast<std::size_t>(sw.game.state_count));
                std::vector<double> w(v.size());
                for (double& x : v) x = u(rng);
                for (double& x : w) x = u(rng);
                const auto lv = sasg::bellman_step(sw.game, sw.policy, j, identity, v);
                const auto lw = sasg::bellman_step(sw.game, sw.policy, j, identity, w);
                double num = 0.0, den = 0.0;
                for (std::size_t s = 0; s < v.size(); ++s) {
                    num = std::max(num, std::abs(lv.values[s] - lw.values[s]));
                    den = std::max(den, std::abs(v[s] - w[s]));
                }
                require(num <= sw.game.gamma * den + contraction_slack,
                        "contraction violated: |Lv-Lw| " + fmt(num) + " > gamma*|v-w| " +
                            fmt(sw.game.gamma * den));
                ++pairs;
            }

            // fixed point equals the exhaustive minimum over deterministic maps
            const auto adv = sasg::optimal_adversary(sw.game, sw.policy, j, identity);
            std::vector<double> best(static_cast<std::size_t>(sw.game.state_count),
                                     std::numeric_limits<double>::infinity());
            std::vector<int> map(static_cast<std::size_t>(sw.game.state_count), 0);
            bool done = false;
            while (!done) {
                sasg::Perturbation p = identity;
                auto& mine = p.maps[static_cast<std::size_t>(j)];
                for (int s = 0; s < sw.game.state_count; ++s)
                    mine[static_cast<std::size_t>(s)] =
                        sw.game.admissible[static_cast<std::size_t>(j)]
                                          [static_cast<std::size_t>(s)]
                                          [static_cast<std::size_t>(
                                              map[static_cast<std::size_t>(s)])];
                const auto values = sasg::policy_value(sw.game, sw.policy, p);
                for (std::size_t s = 0; s < best.size(); ++s)
                    best[s] = std::min(best[s], values.values[static_cast<std::size_t>(j)][s]);
                done = true;
                for (int s = 0; s < sw.game.state_count && done; ++s) {
                    auto& digit = map[static_cast<std::size_t>(s)];
                    const int limit = static_cast<int>(
                        sw.game.admissible[static_cast<std::size_t>(j)]
                                          [static_cast<std::size_t>(s)]
                                              .size());
                    if (++digit < limit) {
                        done = false;
                    } else {
                        digit = 0;
                    }
                }
            }
            for (std::size_t s = 0; s < best.size(); ++s) {
                const double gap = std::abs(best[s] - adv.values[s]);
                worst_gap = std::max(worst_gap, gap);
                require(gap <= fixed_point_tol,
                        "fixed point deviates from exhaustive minimum by " + fmt(gap));
            }
            ++agents_checked;
        }
    }
    return std::to_string(game_sweep().size()) + " games, " + std::to_string(pairs) +
           " contraction pairs, " + std::to_string(agents_checked) +
           " exhaustive minima (worst gap " + fmt(worst_gap, 3) + ")";
}

double certificate_ratio(const sasg::CertificateReport& cert) {
    return cert.rhs / cert.lhs;
}

std::string check_certificate() {
    int certified = 0;
    int unstable = 0;  // two attackers may lack a jointly stable deterministic profile
    for (const SweptGame& sw : game_sweep()) {
        for (int j = 0; j < sw.game.attacked_count; ++j) {
            sasg::CertificateReport cert;
            try {
                cert = sasg::value_drop_certificate(sw.game, sw.policy, j);
            } catch (const std::domain_error&) {
                ++unstable;
                continue;
            }
            require(cert.lhs <= cert.rhs + certificate_tol,
                    "bound violated: drop " + fmt(cert.lhs) + " exceeds " + fmt(cert.rhs));
            ++certified;
        }
    }
    require(certified >= 100, "only " + std::to_string(certified) + " certified pairs");

    // committed extremes produced by the sweep tooling
    const auto ratio_of = [](const std::string& name, bool want_max) {
        std::ifstream in(repo_root + "/fixtures/sasg/" + name);
        require(static_cast<bool>(in), "cannot open fixtures/sasg/" + name);
        const auto fx = sasg::load_fixture(in);
        require(fx.policy.has_value(), name + " lacks a policy");
        double best = want_max ? 0.0 : std::numeric_limits<double>::infinity();
        for (int j = 0; j < fx.game.attacked_count; ++j) {
            const auto cert = sasg::value_drop_certificate(fx.game, *fx.policy, j);
            require(cert.lhs > 0.0, name + ": degenerate certificate (no value drop)");
            const double r = certificate_ratio(cert);
            best = want_max ? std::max(best, r) : std::min(best, r);
        }
        return best;
    };
    const double loose = ratio_of("bound_loose.sasg", true);
    require(loose >= loose_ratio_min,
            "loose fixture ratio " + fmt(loose) + " below " + fmt(loose_ratio_min));
    const double tight = ratio_of("bound_tight.sasg", false);
    require(tight <= tight_ratio_max,
            "tight fixture ratio " + fmt(tight) + " above " + fmt(tight_ratio_max));
    return std::to_string(certified) + " certificates hold (" + std::to_string(unstable) +
           " pairs without a stable joint adversary skipped); committed ratios " +
           fmt(loose, 6) + " (loose) and " + fmt(tight, 4) + " (tight)";
}

std::string check_attack_effectiveness() {
    const VariantResults& m = lab.results("mfac");
    require(m.clean_pool > 0.0,
            "clean pooled reward " + fmt(m.clean_pool) + " is not positive");
    const double drop = (m.clean_pool - m.attacked_pool) / m.clean_pool;
    std::ostringstream os;
    os << "clean " << fmt(m.clean_pool) << " -> attacked " << fmt(m.attacked_pool) << " (drop "
       << fmt(100.0 * drop, 3) << "%; per-seed clean";
    for (double v : m.clean_by_seed) os << " " << fmt(v);
    os << ", attacked";
    for (double v : m.attacked_by_seed) os << " " << fmt(v);
    os << ")";
    require(drop >= attack_drop_min, "reward drop " + fmt(100.0 * drop, 3) + "% below " +
                                         fmt(100.0 * attack_drop_min, 3) + "%: " + os.str());
    return os.str();
}

std::string check_robustness_gain() {
    const VariantResults& m = lab.results("mfac");
    const VariantResults& r = lab.results("romfac");
    for (std::size_t s = 0; s < 3; ++s)
        require(r.attacked_by_seed[s] > m.attacked_by_seed[s],
                "seed " + std::to_string(s + 1) + ": robust " + fmt(r.attacked_by_seed[s]) +
                    " not above plain " + fmt(m.attacked_by_seed[s]));
    const double gain = (r.attacked_pool - m.attacked_pool) / std::abs(m.attacked_pool);
    require(gain >= robust_gain_min,
            "pooled attacked gain " + fmt(100.0 * gain, 3) + "% below " +
                fmt(100.0 * robust_gain_min, 3) + "% (robust " + fmt(r.attacked_pool) +
                " vs plain " + fmt(m.attacked_pool) + ")");
    std::ostringstream os;
    os << "attacked: robust " << fmt(r.attacked_pool) << " vs plain " << fmt(m.attacked_pool)
       << " (+" << fmt(100.0 * gain, 3) << "%), sign-consistent on all 3 seeds";
    return os.str();
}

std::string check_clean_retention() {
    const VariantResults& m = lab.results("mfac");
    const VariantResults& r = lab.results("romfac");
    require(r.clean_pool >= clean_retention_min * m.clean_pool,
            "robust clean " + fmt(r.clean_pool) + " below " + fmt(clean_retention_min, 3) +
                " x plain clean " + fmt(m.clean_pool));
    return "clean: robust " + fmt(r.clean_pool) + " vs plain " + fmt(m.clean_pool) + " (ratio " +
           fmt(r.clean_pool / m.clean_pool, 3) + ")";
}

std::string check_ablation_ordering() {
    const VariantResults& full = lab.results("romfac");
    const VariantResults& single = lab.results("romfac1");
    const VariantResults& sa = lab.results("sa-mfac");
    const VariantResults& sa3 = lab.results("sa-mfac3");
    std::ostringstream os;
    os << "attacked pooled: repeated-loop " << fmt(full.attacked_pool) << " vs single-loop "
       << fmt(single.attacked_pool) << "; report: ramped-attack " << fmt(sa.attacked_pool)
       << " vs repeated-attack " << fmt(sa3.attacked_pool);
    require(full.attacked_pool >= single.attacked_pool,
            "repeated-loop schedule " + fmt(full.attacked_pool) + " below single-loop " +
                fmt(single.attacked_pool));
    return os.str();
}

std::string check_no_equilibrium_fixture() {
    std::ifstream in(repo_root + "/fixtures/sasg/nash_none.sasg");
    require(static_cast<bool>(in), "cannot open fixtures/sasg/nash_none.sasg");
    const auto fx = sasg::load_fixture(in);
    const auto a = sasg::nash_existence_scan(fx.game);
    const auto b = sasg::nash_existence_scan(fx.game);
    require(!a.equilibrium_found, "an equilibrium exists after all");
    require(a.undecided_profiles == 0 && a.inconclusive_profiles == 0,
            "scan left profiles undecided, the verdict is not exhaustive");
    require(a.equilibria_count == b.equilibria_count &&
                a.undecided_profiles == b.undecided_profiles &&
                a.inconclusive_profiles == b.inconclusive_profiles &&
                a.equilibrium_found == b.equilibrium_found,
            "repeated scans disagree");
    return "no stable profile among " + std::to_string(a.profiles_total) +
           ", reproduced deterministically";
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(static_cast<bool>(in), "cannot read " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::string check_determinism() {
    const fs::path base = fs::temp_directory_path() / "romfac_acceptance_determinism";
    fs::remove_all(base);
    const std::string train_ini =
        "[env]\n"
        "width = 5\nheight = 5\nteam_a = 2\nteam_b = 2\nview_radius = 1\nmax_steps = 10\n"
        "[train]\n"
        "variant = romfac\nmu = 0.3\nepsilon = 0.05\n"
        "warmup_rounds = 2\nloop_rounds = 3\nloop_count = 2\n"
        "hidden = 8\nminibatch = 4\nbuffer = 64\nseed = 11\n"
        "[attack]\nsteps = 2\n";
    std::istringstream ta(train_ini), tb(train_ini);
    const auto arta = harness::run_training(harness::Config::parse(ta), (base / "a").string());
    const auto artb = harness::run_training(harness::Config::parse(tb), (base / "b").string());
    require(slurp(arta.metrics_path) == slurp(artb.metrics_path),
            "repeated training produced different metrics CSVs");
    require(slurp(arta.checkpoint_path) == slurp(artb.checkpoint_path),
            "repeated training produced different checkpoints");

    const std::string eval_ini =
        "[env]\n"
        "width = 5\nheight = 5\nteam_a = 2\nteam_b = 2\nview_radius = 1\n"
        "[eval]\n"
        "episodes = 3\nmax_steps = 8\nattacked = 0 1 2\nattack_steps = 2\nseeds = 1 2\n";
    std::istringstream ea(eval_ini), eb(eval_ini);
    const auto eva = harness::run_evaluation_files(arta.checkpoint_path,
                                                   harness::Config::parse(ea),
                                                   (base / "ea").string());
    const auto evb = harness::run_evaluation_files(arta.checkpoint_path,
                                                   harness::Config::parse(eb),
                                                   (base / "eb").string());
    require(slurp(eva.metrics_path) == slurp(evb.metrics_path),
            "repeated evaluation produced different metrics CSVs");
    require(slurp(eva.episodes_path) == slurp(evb.episodes_path),
            "repeated evaluation produced different episode CSVs");
    fs::remove_all(base);
    return "train and evaluate CSVs bitwise stable across reruns";
}

struct Check {
    const char* name;
    std::function<std::string()> run;
    double budget_s;
};

}  // namespace

int main(int argc, char** argv) {
    // optional substring filters: run only the checks whose name contains one
    const std::vector<std::string> filters(argv + 1, argv + argc);
    const auto selected = [&](const std::string& name) {
        if (filters.empty()) return true;
        for (const std::string& f : filters)
            if (name.find(f) != std::string::npos) return true;
        return false;
    };
    const Check checks[] = {
        {"gradient correctness", check_gradients, budget_gradients_s},
        {"coefficient schedule exactness", check_schedule, budget_schedule_s},
        {"bellman contraction and fixed point", check_contraction_and_fixed_point,
         budget_contraction_s},
        {"value-drop certificate", check_certificate, budget_certificate_s},
        {"attack effectiveness on trained policies", check_attack_effectiveness,
         budget_attack_s},
        {"robust training gain under attack", check_robustness_gain, budget_robust_gain_s},
        {"clean-performance retention", check_clean_retention, 0.0},
        {"schedule ablation ordering", check_ablation_ordering, 0.0},
        {"no-equilibrium fixture reproduction", check_no_equilibrium_fixture,
         budget_no_equilibrium_s},
        {"output determinism", check_determinism, 0.0},
    };

    int failures = 0;
    int index = 0;
    for (const Check& c : checks) {
        ++index;
        if (!selected(c.name)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        std::string detail;
        bool ok = true;
        try {
            detail = c.run();
        } catch (const std::exception& e) {
            ok = false;
            detail = e.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (ok && c.budget_s > 0.0 && secs > c.budget_s) {
            ok = false;
            detail = "within tolerances but over the " + fmt(c.budget_s, 3) + "s budget (" +
                     fmt(secs, 3) + "s); " + detail;
        }
        if (!ok) ++failures;
        std::cout << (ok ? "PASS" : "FAIL") << " [" << index << "/10] " << c.name << " — "
                  << detail << " [" << fmt(secs, 3) << "s]\n"
                  << std::flush;
    }
    if (failures > 0) std::cout << failures << " of 10 checks failed\n";
    return failures;
}
