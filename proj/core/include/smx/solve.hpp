#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "smx/mdp.hpp"
#include "smx/operators.hpp"

namespace smx {

// |S| x |A| action-value table.
struct QTable {
    int n_states = 0;
    int n_actions = 0;
    std::vector<double> values;  // [s][a], row-major

    static QTable zeros(int n_states, int n_actions);

    double& at(int s, int a) {
        return values[static_cast<std::size_t>(s) * static_cast<std::size_t>(n_actions) +
                      static_cast<std::size_t>(a)];
    }
    double at(int s, int a) const {
        return values[static_cast<std::size_t>(s) * static_cast<std::size_t>(n_actions) +
                      static_cast<std::size_t>(a)];
    }
    std::span<const double> row(int s) const {
        return {values.data() + static_cast<std::size_t>(s) * static_cast<std::size_t>(n_actions),
                static_cast<std::size_t>(n_actions)};
    }
};

double sup_norm_diff(const QTable& a, const QTable& b);

// One synchronous backup: out[s][a] = R[s][a] + gamma * sum_s' P(s'|s,a) * op(q[s', .]).
QTable generalized_backup(const TabularMdp& m, const QTable& q, const OperatorSpec& spec);

struct SolveResult {
    QTable q;
    int iterations = 0;
    std::vector<double> residual_history;  // sup-norm change per backup
    bool converged = false;
};

// Iterates generalized_backup from q0 (zeros when omitted) until the
// sup-norm residual drops to tol or max_iters is hit. q0 entries must lie
// in [-r_max, r_max], which keeps every iterate inside
// [-r_max/(1-gamma), r_max/(1-gamma)].
SolveResult value_iteration(const TabularMdp& m, const OperatorSpec& spec, double tol = 1e-10,
                            int max_iters = 1000000, const QTable* q0 = nullptr);

// Converged max-backup fixed point; the reference for every gap measurement.
QTable exact_q_star(const TabularMdp& m, double tol = 1e-10);

// Lowest-index maximizing action per state.
Policy greedy_policy(const QTable& q);

// Fixed point of the policy-restricted backup, iterated to tol.
QTable policy_evaluation(const TabularMdp& m, const Policy& p, double tol = 1e-10);

enum class TargetKind { max_target, double_target, mellowmax_target, sm2_target };

// TD target rule for tabular Q-learning with an online table and a
// periodically synced frozen table:
//   max_target       R + gamma * max_a' frozen[s'][a']
//   double_target    R + gamma * frozen[s'][argmax_a' online[s'][a']]
//   mellowmax_target R + gamma * mellowmax(frozen[s', .], omega)
//   sm2_target       R + gamma * soft_mellowmax(frozen[s', .], alpha, omega)
struct TargetRule {
    TargetKind kind = TargetKind::max_target;
    double omega = 0.0;
    double alpha = 0.0;

    static TargetRule max_target() { return {TargetKind::max_target, 0.0, 0.0}; }
    static TargetRule double_target() { return {TargetKind::double_target, 0.0, 0.0}; }
    static TargetRule mellowmax_target(double omega) {
        return {TargetKind::mellowmax_target, omega, 0.0};
    }
    static TargetRule sm2_target(double alpha, double omega) {
        return {TargetKind::sm2_target, omega, alpha};
    }

    void validate() const;
    std::string name() const;
};

// Linear exploration schedule: start to end over decay_steps, then constant.
struct EpsilonSchedule {
    double start = 1.0;
    double end = 0.01;
    long long decay_steps = 1000;

    double at(long long step) const;
    void validate() const;
};

struct QLearnParams {
    long long steps = 200000;
    double lr = 0.1;
    EpsilonSchedule epsilon;
    long long target_sync_period = 200;
    std::uint64_t seed = 0;
    long long bias_record_period = 1000;
    double q_star_tol = 1e-10;
};

struct BiasPoint {
    long long step = 0;
    double mean_bias = 0.0;
};

struct QLearnResult {
    QTable q;
    std::vector<BiasPoint> bias_trace;  // mean over all (s,a) of q - Q*, every bias_record_period
};

// Continuing-task tabular Q-learning: epsilon-greedy behavior on the online
// table, start state drawn from initial_dist, no resets. Deterministic
// given the seed.
QLearnResult q_learning(const TabularMdp& m, const TargetRule& rule, const QLearnParams& params);

struct BiasSummary {
    double mean = 0.0;
    double max = 0.0;  // signed maximum of the elementwise difference
    QTable per_state_action;
};

// Elementwise q - q_star, summarized.
BiasSummary estimation_bias(const QTable& q, const QTable& q_star);

}  // namespace smx
