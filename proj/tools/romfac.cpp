// Command-line front end: training runs, robustness evaluations, tabular
// game verification, and gradient checking, all driven by INI configs.

#include <cstdlib>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "romfac/config.hpp"
#include "romfac/gradcheck.hpp"
#include "romfac/harness.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_config = 2;
constexpr int exit_verification = 3;
constexpr int exit_runtime = 4;

std::string default_out_dir() {
    const char* env = std::getenv("ROMFAC_OUT_DIR");
    return env != nullptr && *env != '\0' ? env : ".";
}

romfac::harness::Config load_config(const std::string& path,
                                    const std::vector<std::string>& overrides) {
    auto cfg = romfac::harness::Config::parse_file(path);
    for (const std::string& entry : overrides) cfg.set_entry(entry);
    return cfg;
}

int cmd_train(const std::string& config_path, const std::vector<std::string>& overrides,
              const std::string& out_dir) {
    const auto cfg = load_config(config_path, overrides);
    const auto art = romfac::harness::run_training(cfg, out_dir, &std::cout);
    std::cout << "trained " << art.variant << " seed " << art.seed << " for " << art.rounds
              << " rounds\n"
              << "  metrics    " << art.metrics_path << "\n"
              << "  checkpoint " << art.checkpoint_path << "\n"
              << "  summary    " << art.summary_path << "\n";
    return exit_ok;
}

int cmd_evaluate(const std::string& checkpoint, const std::string& config_path,
                 const std::vector<std::string>& overrides, const std::string& out_dir) {
    const auto cfg = load_config(config_path, overrides);
    const auto art = romfac::harness::run_evaluation_files(checkpoint, cfg, out_dir);
    romfac::harness::write_eval_metrics_csv(std::cout, art.output.rows);
    std::cout << "  metrics  " << art.metrics_path << "\n"
              << "  episodes " << art.episodes_path << "\n"
              << "  summary  " << art.summary_path << "\n";
    return exit_ok;
}

int cmd_gradcheck(int count, std::uint64_t seed) {
    const auto rep = romfac::diffcore::run_gradcheck_suite(count, seed);
    std::cout << (rep.pass() ? "PASS" : "FAIL") << " gradient check: " << rep.cases << " cases, "
              << rep.checked_values << " derivatives, max relative error " << rep.max_rel_error
              << "\n";
    if (!rep.pass()) {
        std::cout << "first failure: " << rep.first_failure << "\n";
        return exit_verification;
    }
    return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mean-field actor-critic lab: training, robustness evaluation, and tabular "
                 "state-adversarial game verification"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_dir = default_out_dir();
    std::string checkpoint;

    auto* train = app.add_subcommand("train", "run a training schedule from a config");
    train->add_option("--config", config_path, "INI config with [env] and [train] sections")
        ->required();
    train->add_option("--set", overrides, "override entries as section.key=value");
    train->add_option("--out", out_dir, "output directory")->capture_default_str();

    auto* evaluate =
        app.add_subcommand("evaluate", "sweep attacked-agent counts for a trained checkpoint");
    evaluate->add_option("--checkpoint", checkpoint, "checkpoint file from a training run")
        ->required();
    evaluate->add_option("--config", config_path, "INI config with [env] and [eval] sections")
        ->required();
    evaluate->add_option("--set", overrides, "override entries as section.key=value");
    evaluate->add_option("--out", out_dir, "output directory")->capture_default_str();

    auto* verify = app.add_subcommand(
        "sasg-verify", "check contraction, fixed points, value-drop bounds, and equilibria");
    romfac::harness::SasgVerifyOptions opt;
    std::string nash_out;
    int nash_tries = 20000;
    verify->add_option("--fixtures", opt.fixtures_dir, "directory of .sasg fixtures to verify");
    verify->add_option("--sweep", opt.sweep_games, "number of random games to sweep");
    verify->add_option("--seed", opt.seed, "sweep seed")->capture_default_str();
    verify->add_option("--dump-extremes", opt.dump_dir,
                       "write the sweep's loosest/tightest bound instances here");
    verify->add_option("--profile-budget", opt.nash_profile_budget,
                       "largest policy space scanned for equilibria")
        ->capture_default_str();
    verify->add_option("--search-nash", nash_out,
                       "search for a game without a deterministic equilibrium, save it here");
    verify->add_option("--search-tries", nash_tries, "games to try in the equilibrium search")
        ->capture_default_str();
    verify->add_option("--min-states", opt.spec.min_states)->capture_default_str();
    verify->add_option("--max-states", opt.spec.max_states)->capture_default_str();
    verify->add_option("--min-agents", opt.spec.min_agents)->capture_default_str();
    verify->add_option("--max-agents", opt.spec.max_agents)->capture_default_str();
    verify->add_option("--min-actions", opt.spec.min_actions)->capture_default_str();
    verify->add_option("--max-actions", opt.spec.max_actions)->capture_default_str();
    verify->add_option("--max-views", opt.spec.max_views)->capture_default_str();
    verify->add_option("--gammas", opt.spec.gammas, "discount factors drawn by the sweep");
    verify->add_option("--reward-scale", opt.spec.reward_scale)->capture_default_str();

    auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference check of tape gradients");
    int gc_count = 100;
    std::uint64_t gc_seed = 1;
    gradcheck->add_option("--count", gc_count, "number of random cases")->capture_default_str();
    gradcheck->add_option("--seed", gc_seed, "case generator seed")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config;
    }

    try {
        if (train->parsed()) return cmd_train(config_path, overrides, out_dir);
        if (evaluate->parsed()) return cmd_evaluate(checkpoint, config_path, overrides, out_dir);
        if (gradcheck->parsed()) return cmd_gradcheck(gc_count, gc_seed);

        // sasg-verify: an equilibrium search, fixture checks, and a sweep compose
        int rc = exit_ok;
        if (!nash_out.empty()) {
            const bool found = romfac::harness::search_nash_counterexample(opt.seed, nash_tries,
                                                                           nash_out, &std::cout);
            if (!found) rc = exit_verification;
        }
        if (!opt.fixtures_dir.empty() || opt.sweep_games > 0) {
            const auto rep = romfac::harness::run_sasg_verify(opt, &std::cout);
            if (!rep.pass()) rc = exit_verification;
        } else if (nash_out.empty()) {
            std::cerr << "sasg-verify: nothing to do, pass --fixtures, --sweep, or --search-nash\n";
            return exit_config;
        }
        return rc;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_runtime;
    }
}
