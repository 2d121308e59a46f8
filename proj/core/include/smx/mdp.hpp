#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace smx {

// Finite MDP with dense transition and reward tables. Immutable by
// convention after construction; nothing here mutates a built model.
struct TabularMdp {
    int n_states = 0;
    int n_actions = 0;
    double gamma = 0.0;
    double r_max = 0.0;
    std::vector<double> reward;        // [s][a], row-major
    std::vector<double> transition;    // [s][a][s'], row-major
    std::vector<double> initial_dist;  // over states

    double r(int s, int a) const {
        return reward[static_cast<std::size_t>(s) * static_cast<std::size_t>(n_actions) +
                      static_cast<std::size_t>(a)];
    }
    std::span<const double> transition_row(int s, int a) const {
        const std::size_t base =
            (static_cast<std::size_t>(s) * static_cast<std::size_t>(n_actions) +
             static_cast<std::size_t>(a)) *
            static_cast<std::size_t>(n_states);
        return {transition.data() + base, static_cast<std::size_t>(n_states)};
    }
};

// Deterministic policy: one action index per state.
struct Policy {
    std::vector<int> action;
};

// One invariant breach; state/action are -1 where a coordinate does not apply.
struct Violation {
    std::string field;
    int state = -1;
    int action = -1;
    std::string message;

    std::string to_string() const;
};

// Checks every TabularMdp invariant (shape, row sums within 1e-9,
// probabilities in [0,1], |reward| <= r_max, initial_dist sums to 1,
// gamma in [0,1), finiteness). Never throws; empty result means valid.
std::vector<Violation> validate(const TabularMdp& m);

// Random MDP with fixed branching: each (s, a) reaches `branching` distinct
// successors with simplex-uniform probabilities; rewards uniform in
// [-r_max, r_max]; uniform initial distribution. Pure function of its
// arguments, seed included.
TabularMdp random_mdp(int n_states, int n_actions, int branching, std::uint64_t seed, double gamma,
                      double r_max);

// Two-action chain: action 1 (right) advances with probability 1-slip and
// slips back otherwise; action 0 (left) mirrored; walls saturate. Reward 1
// on (last state, right), 0 elsewhere; r_max = 1.
TabularMdp chain_mdp(int length, double slip, double gamma);

// JSON document with fields n_states, n_actions, gamma, r_max, reward
// ([s][a] row-major), transition ([s][a][s'] row-major), initial_dist.
// Numbers round-trip exactly (17 significant digits). load_mdp validates
// and throws std::runtime_error listing every violation.
void save_mdp(const TabularMdp& m, const std::filesystem::path& path);
TabularMdp load_mdp(const std::filesystem::path& path);

}  // namespace smx
