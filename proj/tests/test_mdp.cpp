#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "smx/mdp.hpp"

using namespace smx;
using doctest::Approx;

namespace {

std::filesystem::path temp_file(const char* name) {
    return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("random_mdp: deterministic in its seed and always valid") {
    const TabularMdp a = random_mdp(5, 3, 2, 7, 0.9, 1.0);
    const TabularMdp b = random_mdp(5, 3, 2, 7, 0.9, 1.0);
    CHECK(a.transition == b.transition);
    CHECK(a.reward == b.reward);
    CHECK(a.initial_dist == b.initial_dist);

    const TabularMdp c = random_mdp(5, 3, 2, 8, 0.9, 1.0);
    CHECK(a.transition != c.transition);

    for (std::uint64_t seed = 0; seed < 20; ++seed)
        CHECK(validate(random_mdp(12, 4, 3, seed, 0.95, 2.0)).empty());
}

TEST_CASE("random_mdp: branching structure") {
    const TabularMdp m = random_mdp(8, 2, 1, 3, 0.9, 1.0);
    for (int s = 0; s < m.n_states; ++s) {
        for (int a = 0; a < m.n_actions; ++a) {
            int nonzero = 0;
            for (double p : m.transition_row(s, a)) {
                if (p != 0.0) {
                    ++nonzero;
                    CHECK(p == 1.0);  // branching=1 rows are one-hot
                }
            }
            CHECK(nonzero == 1);
        }
    }

    const TabularMdp wide = random_mdp(10, 2, 4, 3, 0.9, 1.0);
    for (int s = 0; s < wide.n_states; ++s) {
        for (int a = 0; a < wide.n_actions; ++a) {
            int nonzero = 0;
            for (double p : wide.transition_row(s, a))
                if (p != 0.0) ++nonzero;
            CHECK(nonzero <= 4);
            CHECK(nonzero >= 1);
        }
    }
}

TEST_CASE("random_mdp: parameter errors") {
    CHECK_THROWS_AS(random_mdp(5, 3, 0, 0, 0.9, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(random_mdp(5, 3, 6, 0, 0.9, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(random_mdp(0, 3, 1, 0, 0.9, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(random_mdp(5, 3, 2, 0, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(random_mdp(5, 3, 2, 0, 0.9, 0.0), std::invalid_argument);
}

TEST_CASE("chain_mdp: structure at slip = 0") {
    const TabularMdp m = chain_mdp(3, 0.0, 0.9);
    CHECK(m.n_states == 3);
    CHECK(m.n_actions == 2);
    CHECK(m.r_max == 1.0);
    CHECK(validate(m).empty());

    // from state 1, right reaches state 2 surely
    CHECK(m.transition_row(1, 1)[2] == 1.0);
    CHECK(m.transition_row(1, 0)[0] == 1.0);
    // walls saturate
    CHECK(m.transition_row(0, 0)[0] == 1.0);
    CHECK(m.transition_row(2, 1)[2] == 1.0);
    // reward only on (last, right)
    CHECK(m.r(2, 1) == 1.0);
    CHECK(m.r(2, 0) == 0.0);
    CHECK(m.r(0, 1) == 0.0);
}

TEST_CASE("chain_mdp: slip mass and errors") {
    const TabularMdp m = chain_mdp(4, 0.2, 0.9);
    CHECK(validate(m).empty());
    CHECK(m.transition_row(1, 1)[2] == Approx(0.8).epsilon(1e-15));
    CHECK(m.transition_row(1, 1)[0] == Approx(0.2).epsilon(1e-15));
    CHECK_THROWS_AS(chain_mdp(1, 0.0, 0.9), std::invalid_argument);
    CHECK_THROWS_AS(chain_mdp(3, 1.0, 0.9), std::invalid_argument);
}

TEST_CASE("validate: reports each breach with its coordinates") {
    TabularMdp m = chain_mdp(3, 0.0, 0.9);
    CHECK(validate(m).empty());

    TabularMdp bad_row = m;
    bad_row.transition[(1 * 2 + 1) * 3 + 2] = 0.6;  // row (s=1,a=1) now sums to 0.6
    {
        const auto v = validate(bad_row);
        REQUIRE(v.size() == 1);
        CHECK(v[0].field == "transition");
        CHECK(v[0].state == 1);
        CHECK(v[0].action == 1);
    }

    TabularMdp bad_reward = m;
    bad_reward.reward[0] = 2.0;  // r_max is 1
    {
        const auto v = validate(bad_reward);
        REQUIRE(v.size() == 1);
        CHECK(v[0].field == "reward");
        CHECK(v[0].state == 0);
        CHECK(v[0].action == 0);
        CHECK_FALSE(v[0].to_string().empty());
    }

    TabularMdp bad_init = m;
    bad_init.initial_dist[0] += 0.5;
    CHECK(validate(bad_init).size() == 1);

    TabularMdp bad_gamma = m;
    bad_gamma.gamma = 1.5;
    CHECK_FALSE(validate(bad_gamma).empty());
}

TEST_CASE("mdp file round-trip is exact") {
    const auto path = temp_file("smx_roundtrip.mdp.json");
    const TabularMdp m = random_mdp(6, 3, 2, 42, 0.97, 1.5);
    save_mdp(m, path);
    const TabularMdp back = load_mdp(path);
    CHECK(back.n_states == m.n_states);
    CHECK(back.n_actions == m.n_actions);
    CHECK(back.gamma == m.gamma);
    CHECK(back.r_max == m.r_max);
    CHECK(back.reward == m.reward);
    CHECK(back.transition == m.transition);
    CHECK(back.initial_dist == m.initial_dist);
    std::filesystem::remove(path);
}

TEST_CASE("mdp loader rejects invalid and malformed files") {
    const auto path = temp_file("smx_invalid.mdp.json");
    TabularMdp m = chain_mdp(3, 0.0, 0.9);
    m.reward[0] = 5.0;  // violates |reward| <= r_max
    save_mdp(m, path);
    CHECK_THROWS_WITH_AS(load_mdp(path), doctest::Contains("reward"), std::runtime_error);

    {
        std::ofstream out(path);
        out << "{ not json";
    }
    CHECK_THROWS_AS(load_mdp(path), std::runtime_error);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(load_mdp(path), std::runtime_error);  // missing file
}
