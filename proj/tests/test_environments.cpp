#include <doctest.h>

#include <sstream>

#include "spibb/environments.hpp"
#include "spibb/mdp_io.hpp"
#include "spibb/value_iteration.hpp"

using namespace spibb;

TEST_CASE("environments: advertised shapes") {
    TabularMdp grid = build_env(default_env_spec("gridworld"));
    CHECK(grid.n_states == 25);
    CHECK(grid.n_actions == 4);

    TabularMdp chicken = build_env(default_env_spec("wet_chicken"));
    CHECK(chicken.n_states == 25);
    CHECK(chicken.n_actions == 5);

    TabularMdp rg = build_env(default_env_spec("resource_gathering"));
    CHECK(rg.n_states == 376);
    CHECK(rg.n_actions == 4);
}

TEST_CASE("environments: unknown names and parameters are rejected") {
    CHECK_THROWS_AS(build_env({"mountain_car", {}}), UnknownEnvError);
    CHECK_THROWS_AS(default_env_spec("pong"), UnknownEnvError);
    EnvSpec bad = default_env_spec("gridworld");
    bad.params["slipp"] = 0.5;
    CHECK_THROWS_AS(build_env(bad), InvalidParametersError);
}

TEST_CASE("environments: construction is byte-reproducible") {
    for (const char* name : {"gridworld", "wet_chicken", "resource_gathering"}) {
        std::ostringstream first, second;
        write_mdp(first, build_env(default_env_spec(name)));
        write_mdp(second, build_env(default_env_spec(name)));
        CHECK(first.str() == second.str());
        CHECK(first.str().size() > 0);
    }
}

TEST_CASE("gridworld: goal is absorbing and only source of reward") {
    TabularMdp grid = build_env(default_env_spec("gridworld"));
    int goal = grid.n_states - 1;
    CHECK(grid.is_absorbing(goal));
    for (int a = 0; a < 4; ++a) CHECK(grid.rewards[goal][a] == 0.0);
    double total_reward = 0.0;
    for (int s = 0; s < grid.n_states; ++s)
        for (int a = 0; a < 4; ++a) {
            CHECK(grid.rewards[s][a] >= 0.0);
            total_reward += grid.rewards[s][a];
            // reward equals the probability mass moving onto the goal
            if (s != goal)
                CHECK(grid.rewards[s][a] ==
                      doctest::Approx(path_probability(grid, {s, a, goal})));
        }
    CHECK(total_reward > 0.0);
}

TEST_CASE("wet chicken: waterfall resets to the start, reward grows downstream") {
    TabularMdp chicken = build_env(default_env_spec("wet_chicken"));
    // drifting from the last row must carry waterfall mass back to the start
    int last_row_state = 4 * 5 + 0; // x = 4, y = 0
    double reset_mass = path_probability(chicken, {last_row_state, 0, chicken.initial_state});
    CHECK(reset_mass > 0.0);
    for (int y = 0; y < 5; ++y)
        for (int a = 0; a < 5; ++a) CHECK(chicken.rewards[4 * 5 + y][a] == 4.0);
    CHECK_FALSE(chicken.is_absorbing(chicken.initial_state));
}

TEST_CASE("resource gathering: exactly the unreachable flag combinations are missing") {
    EnvSpec spec = default_env_spec("resource_gathering");
    TabularMdp rg = build_env(spec);
    // 95 free cells, 4 flag combinations, minus the 4 resource-cell states
    // whose own flag is unset.
    CHECK(rg.n_states == 95 * 4 - 4);
    CHECK(rg.r_max == 2.0); // delivering both resources at once
    // some action must carry the enemy penalty
    double min_reward = 0.0;
    for (int s = 0; s < rg.n_states; ++s)
        for (int a = 0; a < 4; ++a) min_reward = std::min(min_reward, rg.rewards[s][a]);
    CHECK(min_reward == doctest::Approx(-0.1)); // penalty * attack probability
}

TEST_CASE("behavior policies: softmax limits") {
    TabularMdp grid = build_env(default_env_spec("gridworld"));
    StochasticPolicy hot = behavior_softmax_q(grid, 2000, 0.2, 1e6, 7);
    for (int s = 0; s < grid.n_states; ++s)
        for (int a = 0; a < 4; ++a) CHECK(hot.probs[s][a] == doctest::Approx(0.25).epsilon(1e-6));

    // cold limit on a bandit with distinct rewards: greedy on the learned values
    TabularMdp bandit = TabularMdp::with_shape(1, 2);
    bandit.default_discount = 0.5;
    bandit.transitions[0][0] = {{0, 1.0}};
    bandit.transitions[0][1] = {{0, 1.0}};
    bandit.rewards[0][0] = 0.1;
    bandit.rewards[0][1] = 0.9;
    bandit.validate();
    StochasticPolicy cold = behavior_softmax_q(bandit, 2000, 0.3, 1e-9, 7);
    CHECK(cold.probs[0][1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("behavior policies: softmax sits strictly between uniform and optimal") {
    TabularMdp chicken = build_env(default_env_spec("wet_chicken"));
    StochasticPolicy pi_b = behavior_softmax_q(chicken, 100000, 0.1, 4.0, 42);
    double rho_b = performance(chicken, pi_b);
    double rho_uniform = performance(chicken, StochasticPolicy::uniform(chicken));
    double rho_star = performance(chicken, greedy_policy(chicken));
    CHECK(rho_b > rho_uniform);
    CHECK(rho_b < rho_star);
}

TEST_CASE("behavior policies: perturbed optimal rows") {
    TabularMdp rg = build_env(default_env_spec("resource_gathering"));
    StochasticPolicy exact = behavior_perturbed_optimal(rg, 0.0);
    StochasticPolicy star = greedy_policy(rg);
    CHECK(exact.probs == star.probs);

    StochasticPolicy soft = behavior_perturbed_optimal(rg, 1e-5);
    for (int s = 0; s < rg.n_states; ++s) {
        double sum = 0.0;
        int at_eps = 0;
        for (int a = 0; a < 4; ++a) {
            sum += soft.probs[s][a];
            if (soft.probs[s][a] == 1e-5) ++at_eps;
        }
        CHECK(sum == 1.0);
        CHECK(at_eps == 3);
    }
    CHECK(performance(rg, soft) <= performance(rg, star));
    CHECK_THROWS_AS(behavior_perturbed_optimal(rg, 0.4), InvalidEpsilonError);
    CHECK_THROWS_AS(behavior_perturbed_optimal(rg, -1e-3), InvalidEpsilonError);
}

TEST_CASE("behavior ordering holds on every benchmark with shipped settings") {
    struct Setting {
        const char* env;
        std::int64_t q_steps;
        double lr, temp;
    };
    for (const Setting& s : {Setting{"gridworld", 50000, 0.25, 0.12},
                             Setting{"wet_chicken", 100000, 0.1, 4.0}}) {
        TabularMdp m = build_env(default_env_spec(s.env));
        StochasticPolicy pi_b = behavior_softmax_q(m, s.q_steps, s.lr, s.temp, 42);
        double rho_b = performance(m, pi_b);
        CHECK(rho_b >= performance(m, StochasticPolicy::uniform(m)));
        CHECK(rho_b <= performance(m, greedy_policy(m)));
    }
    TabularMdp rg = build_env(default_env_spec("resource_gathering"));
    StochasticPolicy pi_b = behavior_perturbed_optimal(rg, 1e-5);
    CHECK(performance(rg, pi_b) >= performance(rg, StochasticPolicy::uniform(rg)));
    CHECK(performance(rg, pi_b) <= performance(rg, greedy_policy(rg)));
}

TEST_CASE("env spec files: round-trip") {
    EnvSpec spec = default_env_spec("wet_chicken");
    spec.params["turbulence"] = 0.8;
    std::ostringstream out;
    write_env_spec(out, spec);
    std::istringstream in(out.str());
    EnvSpec back = read_env_spec(in);
    CHECK(back.name == spec.name);
    CHECK(back.params == spec.params);
}
