#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "romfac/config.hpp"
#include "romfac/sasg.hpp"
#include "romfac/trainer.hpp"

namespace romfac::harness {

// ---- evaluation protocol ------------------------------------------------------

struct EvalConfig {
    int episodes = 20;
    int max_steps = 100;
    std::vector<int> attacked_counts;  // empty → standard_attacked_counts(team size)
    adversary::AttackConfig attack;    // radius/steps filled by eval_config_from
    bool scripted_opponent = true;     // false: the opponent team plays its own nets
    bool sample_actions = false;       // true: draw actions from the policy, as in
                                       // training rollouts; false: greedy argmax
    std::vector<std::uint64_t> seeds = {1, 2, 3};

    void validate(int team_size) const;  // throws std::invalid_argument
};

EvalConfig eval_config_from(const Config& cfg);  // [eval]

// Sweep counts round(team_size * {0, 1/8, 1/4, 1/2, 3/4, 1}), deduplicated.
std::vector<int> standard_attacked_counts(int team_size);

struct EpisodeRecord {
    int attacked = 0;
    std::uint64_t seed = 0;
    int episode = 0;
    int steps = 0;
    bool win = false;
    int kills = 0;
    double total_reward = 0.0;  // summed over the learned team
};

struct MetricsRow {
    std::string variant;
    int attacked_count = 0;
    double winning_rate = 0.0;
    double avg_kill = 0.0;
    double avg_total_reward = 0.0;
    double std_total_reward = 0.0;
    std::vector<std::uint64_t> seeds;
};

// Deterministic policy for the non-learned side: battle opponents close on the
// nearest enemy and attack when adjacent; pursuit prey flee the nearest
// predator. Reads true positions, not observations.
int scripted_action(const gridworld::WorldState& state, int agent_id);

// Population mean/std over one attacked count's records; the records are
// sorted internally, so aggregation is order-independent.
MetricsRow aggregate_records(const std::string& variant, int attacked_count,
                             std::vector<EpisodeRecord> records,
                             const std::vector<std::uint64_t>& seeds);

struct EvalOutput {
    std::vector<MetricsRow> rows;        // one per attacked count, sweep order
    std::vector<EpisodeRecord> records;  // every episode, run order
};

// Attacked-count sweep for a trained run. Team 0 plays its networks greedily;
// the first `attacked` ids of team 0 act on attacked observations. Episode
// seeds are shared across the sweep, so attacked = 0 reproduces the
// attack-free rollout bit for bit.
EvalOutput run_evaluation(const trainer::TrainerRun& run, gridworld::EnvConfig env_config,
                          const EvalConfig& eval);

void write_eval_metrics_csv(std::ostream& out, const std::vector<MetricsRow>& rows);
void write_episode_csv(std::ostream& out, const std::vector<EpisodeRecord>& records);

// ---- orchestration for the command-line tool ------------------------------------

struct TrainingArtifacts {
    std::string variant;
    std::uint64_t seed = 0;
    int rounds = 0;
    std::string metrics_path;
    std::string checkpoint_path;
    std::string summary_path;
};

// Full scheduled run from a parsed config: per-round CSV, final checkpoint,
// JSON summary, all under out_dir. Progress notes go to *progress when given.
TrainingArtifacts run_training(const Config& cfg, const std::string& out_dir,
                               std::ostream* progress = nullptr);

struct EvaluationArtifacts {
    std::string variant;
    std::uint64_t train_seed = 0;
    std::string metrics_path;
    std::string episodes_path;
    std::string summary_path;
    EvalOutput output;
};

EvaluationArtifacts run_evaluation_files(const std::string& checkpoint_path, const Config& cfg,
                                         const std::string& out_dir);

// ---- verification entry points -----------------------------------------------------

struct SasgVerifyOptions {
    std::string fixtures_dir;  // verify every *.sasg file found here
    int sweep_games = 0;       // additionally sweep this many random games
    std::uint64_t seed = 1;
    sasg::RandomGameSpec spec;  // sweep distribution
    std::string dump_dir;       // write loose/tight certificate fixtures from the sweep
    int nash_profile_budget = 100000;  // scan fixtures without a policy when |profiles| fits
};

struct SasgVerifyReport {
    int checks = 0;
    int failures = 0;
    std::vector<std::string> lines;
    bool pass() const { return failures == 0; }
};

SasgVerifyReport run_sasg_verify(const SasgVerifyOptions& opt, std::ostream* log = nullptr);

// Random search for a game where no deterministic joint policy is stable
// under its joint optimal adversary; the find is written to out_path.
bool search_nash_counterexample(std::uint64_t seed, int max_tries, const std::string& out_path,
                                std::ostream* log = nullptr);

}  // namespace romfac::harness
