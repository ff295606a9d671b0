#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "romfac/gradcheck.hpp"
#include "romfac/mfac.hpp"
#include "romfac/net.hpp"

using namespace romfac::mfac;
namespace dc = romfac::diffcore;

namespace {

Tensor random_unit_vector(int n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Tensor t = Tensor::zeros({n});
    for (double& v : t.data) v = unit(rng);
    return t;
}

std::vector<double> flatten_grads(const dc::GradientTape& tape, const dc::TapeNet& ids) {
    std::vector<double> out;
    for (ValueId w : ids.weights) {
        const Tensor& g = tape.gradient(w);
        out.insert(out.end(), g.data.begin(), g.data.end());
    }
    for (ValueId b : ids.biases) {
        const Tensor& g = tape.gradient(b);
        out.insert(out.end(), g.data.begin(), g.data.end());
    }
    return out;
}

// nets with zeroed parameters: uniform actor, zero-valued critic
AgentNets blank_nets(int obs_size, int actions) {
    AgentNets nets;
    nets.observation_size = obs_size;
    nets.action_count = actions;
    nets.actor = dc::make_net({obs_size + actions, actions}, Activation::relu);
    nets.critic = dc::make_net({obs_size + 2 * actions, 1}, Activation::relu);
    nets.target_actor = nets.actor;
    nets.target_critic = nets.critic;
    return nets;
}

Experience one_agent_experience(const Tensor& obs, int action, double reward,
                                const Tensor& obs_next, const Tensor& mean, bool done) {
    Experience exp;
    exp.obs = {obs};
    exp.actions = {action};
    exp.rewards = {reward};
    exp.obs_next = {obs_next};
    exp.means = {mean};
    exp.done = {static_cast<unsigned char>(done)};
    return exp;
}

}  // namespace

TEST_CASE("one-hot and uniform constructors") {
    Tensor h = one_hot(2, 4);
    CHECK(h.data == std::vector<double>{0, 0, 1, 0});
    CHECK_THROWS_AS(one_hot(4, 4), std::invalid_argument);
    CHECK_THROWS_AS(one_hot(-1, 4), std::invalid_argument);

    Tensor u = uniform_distribution(5);
    for (int i = 0; i < 5; ++i) CHECK(u[i] == doctest::Approx(0.2));
    CHECK(is_distribution(u));
    CHECK(is_distribution(h));
    CHECK_FALSE(is_distribution(Tensor::vector({0.5, 0.6})));
    CHECK_FALSE(is_distribution(Tensor::vector({-0.1, 1.1})));
}

TEST_CASE("mean action averages one-hot neighbors") {
    // everyone picks action 2
    std::vector<Tensor> same = {one_hot(2, 4), one_hot(2, 4), one_hot(2, 4)};
    CHECK(mean_action(same, 4).data == std::vector<double>{0, 0, 1, 0});

    // actions 0 and 1 of 3
    std::vector<Tensor> pair = {one_hot(0, 3), one_hot(1, 3)};
    Tensor m = mean_action(pair, 3);
    CHECK(m[0] == doctest::Approx(0.5));
    CHECK(m[1] == doctest::Approx(0.5));
    CHECK(m[2] == 0.0);

    // empty neighborhood falls back to uniform
    Tensor empty = mean_action({}, 3);
    for (int i = 0; i < 3; ++i) CHECK(empty[i] == doctest::Approx(1.0 / 3));

    SUBCASE("permutation invariance") {
        std::vector<Tensor> fwd = {one_hot(0, 4), one_hot(2, 4), one_hot(2, 4), one_hot(3, 4)};
        std::vector<Tensor> rev(fwd.rbegin(), fwd.rend());
        CHECK(mean_action(fwd, 4).data == mean_action(rev, 4).data);
    }
    SUBCASE("index form agrees with the one-hot form") {
        std::vector<Tensor> hots = {one_hot(1, 5), one_hot(4, 5), one_hot(1, 5)};
        CHECK(mean_action(hots, 5).data == mean_action_of({1, 4, 1}, 5).data);
        CHECK(mean_action_of({}, 5).data == uniform_distribution(5).data);
    }
    SUBCASE("malformed inputs are rejected") {
        CHECK_THROWS_AS(mean_action({Tensor::vector({0.5, 0.5})}, 2), std::invalid_argument);
        CHECK_THROWS_AS(mean_action({Tensor::vector({1.0, 1.0})}, 2), std::invalid_argument);
        CHECK_THROWS_AS(mean_action({one_hot(0, 3)}, 4), std::invalid_argument);
        CHECK_THROWS_AS(mean_action_of({7}, 4), std::invalid_argument);
    }
    SUBCASE("any non-empty average is a distribution") {
        std::mt19937_64 rng(12);
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<Tensor> hots;
            const int count = 1 + static_cast<int>(rng() % 6);
            for (int i = 0; i < count; ++i) hots.push_back(one_hot(static_cast<int>(rng() % 9), 9));
            CHECK(is_distribution(mean_action(hots, 9)));
        }
    }
}

TEST_CASE("argmax breaks ties toward the lowest index") {
    CHECK(argmax_index(Tensor::vector({0.25, 0.25, 0.25, 0.25})) == 0);
    CHECK(argmax_index(Tensor::vector({0.1, 0.7, 0.2})) == 1);
    CHECK(argmax_index(Tensor::vector({0.4, 0.1, 0.4, 0.1})) == 0);
    CHECK_THROWS_AS(argmax_index(Tensor::vector({})), std::invalid_argument);
}

TEST_CASE("sampling follows the distribution") {
    Tensor dist = Tensor::vector({0.2, 0.5, 0.3});
    std::mt19937_64 rng(77);
    std::vector<int> counts(3, 0);
    const int draws = 20000;
    for (int i = 0; i < draws; ++i) counts[static_cast<std::size_t>(sample_index(dist, rng))]++;
    CHECK(std::abs(counts[0] / double(draws) - 0.2) < 0.02);
    CHECK(std::abs(counts[1] / double(draws) - 0.5) < 0.02);
    CHECK(std::abs(counts[2] / double(draws) - 0.3) < 0.02);

    // identical generator state, identical draw
    std::mt19937_64 a(5), b(5);
    CHECK(sample_index(dist, a) == sample_index(dist, b));

    // degenerate distribution always yields its support
    std::mt19937_64 c(9);
    for (int i = 0; i < 50; ++i) CHECK(sample_index(one_hot(2, 4), c) == 2);
}

TEST_CASE("agent net bundle construction") {
    AgentNets nets = init_agent_nets(10, 4, {16, 16}, Activation::relu, 3);
    CHECK(nets.actor.widths == std::vector<int>{14, 16, 16, 4});
    CHECK(nets.critic.widths == std::vector<int>{18, 16, 16, 1});
    CHECK(nets.target_actor.widths == nets.actor.widths);
    for (std::size_t l = 0; l < nets.actor.weights.size(); ++l)
        CHECK(nets.target_actor.weights[l].data == nets.actor.weights[l].data);
    for (std::size_t l = 0; l < nets.critic.weights.size(); ++l)
        CHECK(nets.target_critic.weights[l].data == nets.critic.weights[l].data);
    // actor and critic start from different draws
    CHECK(nets.actor.weights[0].data != nets.critic.weights[0].data);
    CHECK_THROWS_AS(init_agent_nets(0, 4, {8}, Activation::relu, 1), std::invalid_argument);
}

TEST_CASE("actor distribution wiring") {
    SUBCASE("zero-weight actor is uniform") {
        AgentNets nets = blank_nets(6, 5);
        std::mt19937_64 rng(1);
        Tensor dist = actor_distribution(nets, random_unit_vector(6, rng),
                                         uniform_distribution(5), false);
        for (int i = 0; i < 5; ++i) CHECK(dist[i] == doctest::Approx(0.2).epsilon(1e-14));
    }
    SUBCASE("observation precedes the mean action in the input layout") {
        AgentNets nets = blank_nets(3, 4);
        // logit 0 reads obs[0], logit 1 reads mean[0]
        nets.actor.weights[0].at(0, 0) = 1.0;
        nets.actor.weights[0].at(1, 3) = 1.0;
        Tensor obs = Tensor::vector({0.9, 0.0, 0.0});
        Tensor mean = one_hot(0, 4);
        Tensor dist = actor_distribution(nets, obs, mean, false);
        Tensor expect = dc::softmax(Tensor::vector({0.9, 1.0, 0.0, 0.0}));
        for (int i = 0; i < 4; ++i) CHECK(dist[i] == doctest::Approx(expect[i]).epsilon(1e-14));
    }
    SUBCASE("target and live agree only while synchronized") {
        AgentNets nets = init_agent_nets(4, 3, {8}, Activation::relu, 11);
        std::mt19937_64 rng(2);
        Tensor obs = random_unit_vector(4, rng);
        Tensor mean = uniform_distribution(3);
        Tensor live = actor_distribution(nets, obs, mean, false);
        Tensor tgt = actor_distribution(nets, obs, mean, true);
        CHECK(live.data == tgt.data);

        nets.actor.weights[0][0] += 0.5;
        CHECK(actor_distribution(nets, obs, mean, false).data !=
              actor_distribution(nets, obs, mean, true).data);

        soft_update(nets, 1.0, 1.0);
        CHECK(actor_distribution(nets, obs, mean, false).data ==
              actor_distribution(nets, obs, mean, true).data);
    }
}

TEST_CASE("critic wiring") {
    SUBCASE("zero-weight critic reads zero") {
        AgentNets nets = blank_nets(4, 3);
        std::mt19937_64 rng(3);
        CHECK(critic_q(nets, random_unit_vector(4, rng), 1, uniform_distribution(3), false) ==
              0.0);
    }
    SUBCASE("input layout is observation, own action, mean action") {
        AgentNets nets = blank_nets(2, 3);
        // q = onehot[1] + 2 * mean[2]
        nets.critic.weights[0].at(0, 2 + 1) = 1.0;
        nets.critic.weights[0].at(0, 2 + 3 + 2) = 2.0;
        Tensor obs = Tensor::vector({0.4, 0.6});
        Tensor mean = Tensor::vector({0.25, 0.25, 0.5});
        CHECK(critic_q(nets, obs, 1, mean, false) == doctest::Approx(1.0 + 2 * 0.5));
        CHECK(critic_q(nets, obs, 0, mean, false) == doctest::Approx(2 * 0.5));
    }
    SUBCASE("different own actions give different values for a random critic") {
        AgentNets nets = init_agent_nets(5, 4, {12}, Activation::relu, 21);
        std::mt19937_64 rng(4);
        Tensor obs = random_unit_vector(5, rng);
        Tensor mean = uniform_distribution(4);
        CHECK(critic_q(nets, obs, 0, mean, false) != critic_q(nets, obs, 1, mean, false));
    }
    SUBCASE("action_values matches per-action queries") {
        AgentNets nets = init_agent_nets(5, 4, {12}, Activation::tanh, 22);
        std::mt19937_64 rng(5);
        Tensor obs = random_unit_vector(5, rng);
        Tensor mean = uniform_distribution(4);
        std::vector<double> all = action_values(nets, obs, mean, true);
        for (int a = 0; a < 4; ++a) CHECK(all[static_cast<std::size_t>(a)] ==
                                          critic_q(nets, obs, a, mean, true));
    }
}

TEST_CASE("value estimate is the exact expectation over own actions") {
    SUBCASE("uniform policy over two actions averages the two values") {
        AgentNets nets = blank_nets(3, 2);
        nets.critic.weights[0].at(0, 3) = 1.0;      // q(a=0) = 1
        nets.critic.weights[0].at(0, 4) = -0.5;     // q(a=1) = -0.5
        nets.target_critic = nets.critic;
        Tensor obs = Tensor::vector({0.1, 0.2, 0.3});
        Tensor mean = uniform_distribution(2);
        CHECK(value_estimate(nets, obs, mean) == doctest::Approx((1.0 - 0.5) / 2).epsilon(1e-14));
    }
    SUBCASE("a saturated policy collapses to a single action value") {
        AgentNets nets = init_agent_nets(4, 3, {8}, Activation::tanh, 31);
        nets.target_actor = dc::make_net(nets.actor.widths, Activation::tanh);
        nets.target_actor.biases.back()[1] = 60.0;  // always pick action 1
        std::mt19937_64 rng(6);
        Tensor obs = random_unit_vector(4, rng);
        Tensor mean = uniform_distribution(3);
        CHECK(value_estimate(nets, obs, mean) ==
              doctest::Approx(critic_q(nets, obs, 1, mean, true)).epsilon(1e-9));
    }
    SUBCASE("random nets match an enumeration built from raw forwards") {
        std::mt19937_64 rng(7);
        for (int trial = 0; trial < 10; ++trial) {
            AgentNets nets = init_agent_nets(6, 4, {10}, Activation::relu, 100 + trial);
            // drift the targets so live and target genuinely differ
            nets.target_actor = dc::init_net(nets.actor.widths, Activation::relu, 200 + trial);
            nets.target_critic = dc::init_net(nets.critic.widths, Activation::relu, 300 + trial);
            Tensor obs = random_unit_vector(6, rng);
            Tensor mean = mean_action_of({static_cast<int>(rng() % 4)}, 4);

            std::vector<double> joined = obs.data;
            joined.insert(joined.end(), mean.data.begin(), mean.data.end());
            Tensor probs = dc::softmax(dc::forward(nets.target_actor, Tensor::vector(joined)));

            double expect = 0.0;
            for (int a = 0; a < 4; ++a) {
                std::vector<double> cin = obs.data;
                const Tensor hot = one_hot(a, 4);
                cin.insert(cin.end(), hot.data.begin(), hot.data.end());
                cin.insert(cin.end(), mean.data.begin(), mean.data.end());
                expect += probs[a] * dc::forward(nets.target_critic, Tensor::vector(cin))[0];
            }
            CHECK(value_estimate(nets, obs, mean) == doctest::Approx(expect).epsilon(1e-12));
        }
    }
}

TEST_CASE("temporal-difference targets") {
    AgentNets nets = init_agent_nets(3, 2, {6}, Activation::tanh, 41);
    std::mt19937_64 rng(8);
    Tensor obs = random_unit_vector(3, rng);
    Tensor next = random_unit_vector(3, rng);
    Tensor mean = uniform_distribution(2);

    SUBCASE("terminal samples use the raw reward") {
        Experience exp = one_agent_experience(obs, 0, 2.5, Tensor{}, mean, true);
        CHECK(td_target(nets, 0, exp, 0.9) == 2.5);
    }
    SUBCASE("zero discount uses the raw reward") {
        Experience exp = one_agent_experience(obs, 0, 1.25, next, mean, false);
        CHECK(td_target(nets, 0, exp, 0.0) == 1.25);
    }
    SUBCASE("bootstrapped target adds the discounted value estimate") {
        Experience exp = one_agent_experience(obs, 1, -0.5, next, mean, false);
        CHECK(td_target(nets, 0, exp, 0.95) ==
              doctest::Approx(-0.5 + 0.95 * value_estimate(nets, next, mean)).epsilon(1e-14));
    }
    SUBCASE("discount outside [0,1) is rejected") {
        Experience exp = one_agent_experience(obs, 0, 0.0, next, mean, false);
        CHECK_THROWS_AS(td_target(nets, 0, exp, 1.0), std::invalid_argument);
        CHECK_THROWS_AS(td_target(nets, 0, exp, -0.1), std::invalid_argument);
    }
}

TEST_CASE("critic loss values") {
    SUBCASE("perfect prediction gives zero loss") {
        AgentNets nets = blank_nets(3, 2);  // critic outputs 0 everywhere
        Experience exp = one_agent_experience(Tensor::vector({0.1, 0.2, 0.3}), 0, 0.0, Tensor{},
                                              uniform_distribution(2), true);
        CriticLossGraph g = critic_loss(nets, 0, exp, 0.9);
        CHECK(g.tape.value(g.loss)[0] == 0.0);
        CHECK(g.target == 0.0);
    }
    SUBCASE("unit reward against a zero critic costs one") {
        AgentNets nets = blank_nets(3, 2);
        Experience exp = one_agent_experience(Tensor::vector({0.1, 0.2, 0.3}), 1, 1.0,
                                              Tensor::vector({0.4, 0.5, 0.6}),
                                              uniform_distribution(2), false);
        CriticLossGraph g = critic_loss(nets, 0, exp, 0.0);
        CHECK(g.tape.value(g.loss)[0] == doctest::Approx(1.0));
        CHECK(g.target == 1.0);
    }
    SUBCASE("random instances match the scalar recomputation") {
        std::mt19937_64 rng(9);
        for (int trial = 0; trial < 8; ++trial) {
            AgentNets nets = init_agent_nets(5, 3, {8}, Activation::relu, 500 + trial);
            nets.target_critic = dc::init_net(nets.critic.widths, Activation::relu, 600 + trial);
            Experience exp = one_agent_experience(
                random_unit_vector(5, rng), static_cast<int>(rng() % 3),
                std::uniform_real_distribution<double>(-1, 1)(rng), random_unit_vector(5, rng),
                uniform_distribution(3), false);
            const double gamma = 0.9;
            CriticLossGraph g = critic_loss(nets, 0, exp, gamma);
            const double y = exp.rewards[0] + gamma * value_estimate(nets, exp.obs_next[0],
                                                                     exp.means[0]);
            const double q = critic_q(nets, exp.obs[0], exp.actions[0], exp.means[0], false);
            CHECK(g.tape.value(g.loss)[0] == doctest::Approx((y - q) * (y - q)).epsilon(1e-12));
        }
    }
}

TEST_CASE("critic gradients agree with finite differences of the full loss") {
    AgentNets nets = init_agent_nets(4, 3, {6}, Activation::tanh, 51);
    nets.target_actor = dc::init_net(nets.actor.widths, Activation::tanh, 52);
    nets.target_critic = dc::init_net(nets.critic.widths, Activation::tanh, 53);
    std::mt19937_64 rng(10);
    Experience exp = one_agent_experience(random_unit_vector(4, rng), 2, 0.7,
                                          random_unit_vector(4, rng), uniform_distribution(3),
                                          false);
    const double gamma = 0.8;
    const double y = td_target(nets, 0, exp, gamma);

    dc::GradientTape tape;
    dc::TapeNet critic = put_on_tape(tape, nets.critic, LeafKind::parameter);
    ValueId obs_leaf = tape.leaf(exp.obs[0], LeafKind::input);
    ValueId q = taped_critic_q(tape, critic, obs_leaf, tape.constant(one_hot(2, 3)),
                               tape.constant(exp.means[0]));
    ValueId loss = tape.square(tape.shift(tape.scale(q, -1.0), y));
    tape.backward(loss);

    dc::GradCheckCase c;
    // the finite-difference loss recomputes the target from scratch; if any
    // gradient leaked into the target networks this comparison would fail
    c.loss = [&nets, &exp, gamma](const dc::FeedforwardNet& critic_net, const Tensor& obs_in) {
        AgentNets probe = nets;
        probe.critic = critic_net;
        const double yy = td_target(probe, 0, exp, gamma);
        const double qq = critic_q(probe, obs_in, exp.actions[0], exp.means[0], false);
        return (yy - qq) * (yy - qq);
    };
    c.analytic_param_grads = flatten_grads(tape, critic);
    c.analytic_input_grads = tape.gradient(obs_leaf).data;

    dc::GradCheckReport report = dc::check_case(nets.critic, exp.obs[0], c, 1e-5, 1e-4, 1e-7);
    INFO("first failure: ", report.first_failure);
    CHECK(report.pass());
    CHECK(report.checked_values == nets.critic.param_count() + 4);
}

TEST_CASE("policy gradient loss values") {
    std::mt19937_64 rng(11);
    Tensor obs = random_unit_vector(4, rng);
    Tensor next = random_unit_vector(4, rng);
    Tensor mean = uniform_distribution(3);

    SUBCASE("zero value weight silences the loss and its gradients") {
        AgentNets nets = init_agent_nets(4, 3, {6}, Activation::relu, 61);
        nets.target_critic = dc::make_net(nets.critic.widths, Activation::relu);  // Q = 0
        Experience exp = one_agent_experience(obs, 0, 0.0, next, mean, false);
        std::mt19937_64 sampler(12);
        ActorLossGraph g = policy_gradient_loss(nets, 0, exp, sampler);
        CHECK(g.weight == 0.0);
        CHECK(g.tape.value(g.loss)[0] == 0.0);
        g.tape.backward(g.loss);
        for (double v : flatten_grads(g.tape, g.actor)) CHECK(v == 0.0);
    }
    SUBCASE("a certain policy at the sampled action costs nothing") {
        AgentNets nets = blank_nets(4, 3);
        nets.actor.biases[0][1] = 60.0;         // live policy saturated at action 1
        nets.target_actor = nets.actor;         // so the sample is action 1
        nets.target_critic.biases[0][0] = 1.0;  // weight exactly 1
        Experience exp = one_agent_experience(obs, 0, 0.0, next, mean, false);
        std::mt19937_64 sampler(13);
        ActorLossGraph g = policy_gradient_loss(nets, 0, exp, sampler);
        CHECK(g.sampled_action == 1);
        CHECK(g.weight == 1.0);
        CHECK(g.tape.value(g.loss)[0] == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("graph matches a hand-built recomposition") {
        AgentNets nets = init_agent_nets(4, 3, {6}, Activation::tanh, 71);
        nets.target_actor = dc::init_net(nets.actor.widths, Activation::tanh, 72);
        nets.target_critic = dc::init_net(nets.critic.widths, Activation::tanh, 73);
        Experience exp = one_agent_experience(obs, 0, 0.0, next, mean, false);

        std::mt19937_64 sampler(14);
        ActorLossGraph g = policy_gradient_loss(nets, 0, exp, sampler);

        std::mt19937_64 sampler2(14);
        const int a = sample_index(actor_distribution(nets, obs, mean, true), sampler2);
        const double w = critic_q(nets, next, a, mean, true);
        const double ce = dc::cross_entropy(actor_distribution(nets, obs, mean, false), a);
        CHECK(g.sampled_action == a);
        CHECK(g.weight == doctest::Approx(w).epsilon(1e-14));
        CHECK(g.tape.value(g.loss)[0] == doctest::Approx(w * ce).epsilon(1e-12));
    }
    SUBCASE("terminal samples are rejected by the single-sample graph") {
        AgentNets nets = init_agent_nets(4, 3, {6}, Activation::relu, 81);
        Experience exp = one_agent_experience(obs, 0, 0.0, Tensor{}, mean, true);
        std::mt19937_64 sampler(15);
        CHECK_THROWS_AS(policy_gradient_loss(nets, 0, exp, sampler), std::logic_error);
    }
}

TEST_CASE("actor gradients agree with finite differences at a fixed sample") {
    AgentNets nets = init_agent_nets(4, 3, {6}, Activation::tanh, 91);
    nets.target_actor = dc::init_net(nets.actor.widths, Activation::tanh, 92);
    nets.target_critic = dc::init_net(nets.critic.widths, Activation::tanh, 93);
    std::mt19937_64 rng(16);
    Tensor obs = random_unit_vector(4, rng);
    Tensor next = random_unit_vector(4, rng);
    Tensor mean = mean_action_of({0, 2}, 3);

    std::mt19937_64 sampler(17);
    const int a = sample_index(actor_distribution(nets, obs, mean, true), sampler);
    const double w = critic_q(nets, next, a, mean, true);

    dc::GradientTape tape;
    dc::TapeNet actor = put_on_tape(tape, nets.actor, LeafKind::parameter);
    ValueId obs_leaf = tape.leaf(obs, LeafKind::input);
    ValueId probs = taped_actor_distribution(tape, actor, obs_leaf, tape.constant(mean));
    ValueId loss = tape.scale(tape.cross_entropy(probs, a), w);
    tape.backward(loss);

    dc::GradCheckCase c;
    c.loss = [&nets, &mean, a, w](const dc::FeedforwardNet& actor_net, const Tensor& obs_in) {
        AgentNets probe = nets;
        probe.actor = actor_net;
        return w * dc::cross_entropy(actor_distribution(probe, obs_in, mean, false), a);
    };
    c.analytic_param_grads = flatten_grads(tape, actor);
    c.analytic_input_grads = tape.gradient(obs_leaf).data;

    dc::GradCheckReport report = dc::check_case(nets.actor, obs, c, 1e-5, 1e-4, 1e-7);
    INFO("first failure: ", report.first_failure);
    CHECK(report.pass());
}

TEST_CASE("soft updates blend toward the live parameters") {
    AgentNets nets = init_agent_nets(3, 2, {4}, Activation::relu, 101);
    nets.target_actor = dc::init_net(nets.actor.widths, Activation::relu, 102);
    nets.target_critic = dc::init_net(nets.critic.widths, Activation::relu, 103);

    SUBCASE("full rate copies, zero rate freezes") {
        AgentNets full = nets;
        soft_update(full, 1.0, 1.0);
        CHECK(full.target_actor.weights[0].data == full.actor.weights[0].data);
        CHECK(full.target_critic.weights[1].data == full.critic.weights[1].data);

        AgentNets frozen = nets;
        soft_update(frozen, 0.0, 0.0);
        CHECK(frozen.target_actor.weights[0].data == nets.target_actor.weights[0].data);
    }
    SUBCASE("midpoint arithmetic") {
        AgentNets mid = blank_nets(2, 2);
        mid.actor.weights[0].at(0, 0) = 2.0;
        soft_update(mid, 0.5, 0.5);
        CHECK(mid.target_actor.weights[0].at(0, 0) == doctest::Approx(1.0));
    }
    SUBCASE("gap contracts by exactly one minus the rate") {
        const double tau = 0.3;
        double before = 0.0, after_expected = 0.0;
        std::vector<double> gaps;
        for (std::size_t l = 0; l < nets.actor.weights.size(); ++l)
            for (int i = 0; i < nets.actor.weights[l].size(); ++i)
                gaps.push_back(nets.target_actor.weights[l][i] - nets.actor.weights[l][i]);
        for (double gap : gaps) before = std::max(before, std::abs(gap));
        after_expected = (1.0 - tau) * before;

        soft_update(nets, tau, tau);
        double after = 0.0;
        for (std::size_t l = 0; l < nets.actor.weights.size(); ++l)
            for (int i = 0; i < nets.actor.weights[l].size(); ++i)
                after = std::max(after, std::abs(nets.target_actor.weights[l][i] -
                                                 nets.actor.weights[l][i]));
        CHECK(after == doctest::Approx(after_expected).epsilon(1e-12));
    }
    SUBCASE("rates outside the unit interval are rejected") {
        CHECK_THROWS_AS(soft_update(nets, -0.1, 0.5), std::invalid_argument);
        CHECK_THROWS_AS(soft_update(nets, 0.5, 1.1), std::invalid_argument);
    }
}

TEST_CASE("gradient descent step reduces the critic loss") {
    AgentNets nets = init_agent_nets(3, 2, {6}, Activation::tanh, 111);
    std::mt19937_64 rng(18);
    Experience exp = one_agent_experience(random_unit_vector(3, rng), 1, 1.0, Tensor{},
                                          uniform_distribution(2), true);
    CriticLossGraph g = critic_loss(nets, 0, exp, 0.9);
    const double before = g.tape.value(g.loss)[0];
    REQUIRE(before > 0.0);
    g.tape.backward(g.loss);
    sgd_step(nets.critic, g.tape, g.critic, 0.05);

    CriticLossGraph g2 = critic_loss(nets, 0, exp, 0.9);
    CHECK(g2.tape.value(g2.loss)[0] < before);

    SUBCASE("a net with a different layout is rejected") {
        dc::FeedforwardNet deep = dc::init_net({4, 5, 5, 2}, Activation::relu, 7);
        CHECK_THROWS_AS(sgd_step(deep, g.tape, g.critic, 0.1), std::invalid_argument);
    }
}

TEST_CASE("experience validation") {
    Experience exp;
    exp.obs = {Tensor::vector({0.1})};
    exp.actions = {0};
    exp.rewards = {0.0};
    exp.obs_next = {Tensor::vector({0.2})};
    exp.means = {uniform_distribution(2)};
    exp.done = {0};
    CHECK_NOTHROW(exp.validate());
    CHECK(exp.agent_count() == 1);
    CHECK(exp.has_sample(0));

    SUBCASE("length mismatch") {
        exp.rewards.push_back(1.0);
        CHECK_THROWS_AS(exp.validate(), std::invalid_argument);
    }
    SUBCASE("sample without a mean") {
        exp.means[0] = Tensor{};
        CHECK_THROWS_AS(exp.validate(), std::invalid_argument);
    }
    SUBCASE("terminal sample with a next observation") {
        exp.done[0] = 1;
        CHECK_THROWS_AS(exp.validate(), std::invalid_argument);
    }
    SUBCASE("ongoing sample missing its next observation") {
        exp.obs_next[0] = Tensor{};
        CHECK_THROWS_AS(exp.validate(), std::invalid_argument);
    }
    SUBCASE("dead agents hold empty slots") {
        exp.obs[0] = Tensor{};
        exp.obs_next[0] = Tensor{};
        exp.means[0] = Tensor{};
        CHECK_NOTHROW(exp.validate());
        CHECK_FALSE(exp.has_sample(0));
    }
}
