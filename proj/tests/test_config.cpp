#include <sstream>
#include <stdexcept>

#include "doctest.h"
#include "romfac/config.hpp"

using romfac::harness::Config;

namespace {

Config parse_text(const std::string& text) {
    std::istringstream in(text);
    return Config::parse(in);
}

}  // namespace

TEST_CASE("sections flatten to dotted keys and later assignments win") {
    const Config cfg = parse_text(
        "[env]\n"
        "width = 8\n"
        "height=10\n"
        "\n"
        "[train]  # trailing comment\n"
        "variant = romfac ; another comment style\n"
        "mu = 0.5\n"
        "mu = 0.75\n");
    CHECK(cfg.get_int("env.width", -1) == 8);
    CHECK(cfg.get_int("env.height", -1) == 10);
    CHECK(cfg.get_string("train.variant", "") == "romfac");
    CHECK(cfg.get_double("train.mu", 0.0) == 0.75);
    CHECK(cfg.has("env.width"));
    CHECK_FALSE(cfg.has("env.depth"));
}

TEST_CASE("comments and blank lines are ignored") {
    const Config cfg = parse_text(
        "# full-line comment\n"
        "; another\n"
        "\n"
        "[env]\n"
        "   width = 5   \n");
    CHECK(cfg.get_int("env.width", -1) == 5);
}

TEST_CASE("parse errors carry line numbers") {
    CHECK_THROWS_WITH_AS(parse_text("width = 5\n"), doctest::Contains("line 1"),
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_text("[env]\nnonsense\n"), doctest::Contains("line 2"),
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_text("[env]\n= 3\n"), doctest::Contains("line 2"),
                         std::invalid_argument);
    CHECK_THROWS_AS(parse_text("[]\n"), std::invalid_argument);
}

TEST_CASE("typed getters reject malformed values but honor fallbacks") {
    const Config cfg = parse_text(
        "[a]\n"
        "num = banana\n"
        "flag = maybe\n"
        "half = 1.5\n"
        "big = 18446744073709551615\n"
        "truthy = true\n"
        "listy = 1 2 3\n"
        "seeds = 7 9\n");
    CHECK_THROWS_AS((void)cfg.get_int("a.num", 0), std::invalid_argument);
    CHECK_THROWS_AS((void)cfg.get_double("a.num", 0.0), std::invalid_argument);
    CHECK_THROWS_AS((void)cfg.get_bool("a.flag", false), std::invalid_argument);
    CHECK_THROWS_AS((void)cfg.get_int("a.half", 0), std::invalid_argument);
    CHECK(cfg.get_u64("a.big", 0) == 18446744073709551615ull);
    CHECK(cfg.get_bool("a.truthy", false));
    CHECK(cfg.get_int_list("a.listy", {}) == std::vector<int>{1, 2, 3});
    CHECK(cfg.get_u64_list("a.seeds", {}) == std::vector<std::uint64_t>{7, 9});
    CHECK(cfg.get_int("a.missing", 42) == 42);
    CHECK(cfg.get_string("a.missing", "dflt") == "dflt");
    CHECK(cfg.get_int_list("a.missing", {5}) == std::vector<int>{5});
}

TEST_CASE("set_entry applies section.key=value overrides") {
    Config cfg = parse_text("[env]\nwidth = 8\n");
    cfg.set_entry("env.width=12");
    cfg.set_entry("train.mu = 0.25");
    CHECK(cfg.get_int("env.width", -1) == 12);
    CHECK(cfg.get_double("train.mu", 0.0) == 0.25);
    CHECK_THROWS_AS(cfg.set_entry("no-equals-sign"), std::invalid_argument);
    CHECK_THROWS_AS(cfg.set_entry("nodot=1"), std::invalid_argument);
    CHECK_THROWS_AS(cfg.set_entry("=1"), std::invalid_argument);
}

TEST_CASE("reject_unknown names untouched keys in consumed sections only") {
    const Config cfg = parse_text(
        "[env]\n"
        "width = 8\n"
        "widht = 9\n"
        "[other]\n"
        "whatever = 1\n");
    (void)cfg.get_int("env.width", -1);
    CHECK_THROWS_WITH_AS(cfg.reject_unknown({"env"}), doctest::Contains("env.widht"),
                         std::invalid_argument);
    // a section the caller never claimed is left alone
    CHECK_NOTHROW(cfg.reject_unknown({"train"}));
}

TEST_CASE("parse_file reports missing files") {
    CHECK_THROWS_AS((void)Config::parse_file("/nonexistent/romfac.ini"), std::runtime_error);
}

TEST_CASE("environment section builds a validated grid config") {
    const Config cfg = parse_text(
        "[env]\n"
        "scenario = pursuit\n"
        "width = 6\n"
        "height = 7\n"
        "team_a = 3\n"
        "team_b = 2\n"
        "view_radius = 1\n"
        "max_steps = 50\n"
        "max_hp = 4\n"
        "hit_damage = 1\n"
        "reward_step = 0.01\n"
        "reward_kill = 2.5\n");
    const auto env = romfac::harness::env_config_from(cfg);
    CHECK(env.scenario == romfac::gridworld::Scenario::pursuit);
    CHECK(env.width == 6);
    CHECK(env.height == 7);
    CHECK(env.team_a_size == 3);
    CHECK(env.team_b_size == 2);
    CHECK(env.view_radius == 1);
    CHECK(env.max_steps == 50);
    CHECK(env.max_hp == 4);
    CHECK(env.hit_damage == 1);
    CHECK(env.rewards.step == 0.01);
    CHECK(env.rewards.kill == 2.5);
    // untouched defaults survive
    CHECK(env.rewards.attack_hit == romfac::gridworld::RewardTable{}.attack_hit);
    CHECK_NOTHROW(cfg.reject_unknown({"env"}));
}

TEST_CASE("environment section rejects invalid settings through validate") {
    const Config cfg = parse_text("[env]\nwidth = 0\n");
    CHECK_THROWS_AS((void)romfac::harness::env_config_from(cfg), std::invalid_argument);
}

TEST_CASE("training section builds a validated trainer config") {
    const Config cfg = parse_text(
        "[train]\n"
        "variant = sa-mfac3\n"
        "mu = 0.4\n"
        "epsilon = 0.05\n"
        "warmup_rounds = 10\n"
        "loop_rounds = 20\n"
        "loop_count = 3\n"
        "ramp_fraction = 0.25\n"
        "hidden = 16 16\n"
        "activation = tanh\n"
        "actor_lr = 0.002\n"
        "critic_lr = 0.004\n"
        "tau_actor = 0.02\n"
        "tau_critic = 0.03\n"
        "gamma = 0.9\n"
        "minibatch = 16\n"
        "buffer = 512\n"
        "[attack]\n"
        "steps = 5\n"
        "step_size = 0.01\n"
        "clip_low = 0\n"
        "clip_high = 1\n");
    const auto t = romfac::harness::trainer_config_from(cfg);
    CHECK(t.variant == romfac::trainer::Variant::sa_mfac3);
    CHECK(t.mu_target == 0.4);
    CHECK(t.epsilon_target == 0.05);
    CHECK(t.warmup_rounds == 10);
    CHECK(t.loop_rounds == 20);
    CHECK(t.loop_count == 3);
    CHECK(t.ramp_fraction == 0.25);
    CHECK(t.hidden == std::vector<int>{16, 16});
    CHECK(t.activation == romfac::diffcore::Activation::tanh);
    CHECK(t.actor_lr == 0.002);
    CHECK(t.critic_lr == 0.004);
    CHECK(t.tau_actor == 0.02);
    CHECK(t.tau_critic == 0.03);
    CHECK(t.gamma == 0.9);
    CHECK(t.minibatch == 16);
    CHECK(t.buffer_capacity == 512);
    CHECK(t.attack.steps == 5);
    CHECK(t.attack.step_size == 0.01);
    CHECK(t.total_rounds() == 10 + 3 * 20);
    CHECK_NOTHROW(cfg.reject_unknown({"train", "attack"}));
}

TEST_CASE("training section rejects unknown variants and bad numbers") {
    CHECK_THROWS_AS((void)romfac::harness::trainer_config_from(
                        parse_text("[train]\nvariant = dqn\n")),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)romfac::harness::trainer_config_from(
                        parse_text("[train]\ngamma = 1.5\n")),
                    std::invalid_argument);
}
