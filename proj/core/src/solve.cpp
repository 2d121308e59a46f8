#include "smx/solve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "smx/rng.hpp"

namespace smx {

namespace {

void require_shapes(const TabularMdp& m, const QTable& q) {
    if (q.n_states != m.n_states || q.n_actions != m.n_actions)
        throw std::invalid_argument("QTable shape does not match the MDP");
    if (q.values.size() !=
        static_cast<std::size_t>(m.n_states) * static_cast<std::size_t>(m.n_actions))
        throw std::invalid_argument("QTable storage size does not match its shape");
    for (double v : q.values)
        if (!std::isfinite(v)) throw std::invalid_argument("QTable has a non-finite entry");
}

int argmax_lowest(std::span<const double> row) {
    int best = 0;
    for (int a = 1; a < static_cast<int>(row.size()); ++a)
        if (row[static_cast<std::size_t>(a)] > row[static_cast<std::size_t>(best)]) best = a;
    return best;
}

// Next state drawn by inverse-CDF walk over the transition row.
int sample_next_state(std::span<const double> row, Rng& rng) {
    const double u = rng.uniform01();
    double acc = 0.0;
    int last_positive = 0;
    for (int s2 = 0; s2 < static_cast<int>(row.size()); ++s2) {
        const double p = row[static_cast<std::size_t>(s2)];
        if (p > 0.0) last_positive = s2;
        acc += p;
        if (u < acc) return s2;
    }
    return last_positive;  // guards against row sums a hair below 1
}

}  // namespace

QTable QTable::zeros(int n_states, int n_actions) {
    QTable q;
    q.n_states = n_states;
    q.n_actions = n_actions;
    q.values.assign(static_cast<std::size_t>(n_states) * static_cast<std::size_t>(n_actions), 0.0);
    return q;
}

double sup_norm_diff(const QTable& a, const QTable& b) {
    if (a.values.size() != b.values.size())
        throw std::invalid_argument("QTable shapes differ");
    double worst = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i)
        worst = std::max(worst, std::abs(a.values[i] - b.values[i]));
    return worst;
}

QTable generalized_backup(const TabularMdp& m, const QTable& q, const OperatorSpec& spec) {
    require_shapes(m, q);
    spec.validate();

    // Operator value of each successor state, computed once per state.
    std::vector<double> state_value(static_cast<std::size_t>(m.n_states));
    for (int s = 0; s < m.n_states; ++s)
        state_value[static_cast<std::size_t>(s)] = apply_operator(q.row(s), spec);

    QTable out = QTable::zeros(m.n_states, m.n_actions);
    for (int s = 0; s < m.n_states; ++s) {
        for (int a = 0; a < m.n_actions; ++a) {
            auto row = m.transition_row(s, a);
            double exp_next = 0.0;
            for (int s2 = 0; s2 < m.n_states; ++s2) {
                const double p = row[static_cast<std::size_t>(s2)];
                if (p > 0.0) exp_next += p * state_value[static_cast<std::size_t>(s2)];
            }
            out.at(s, a) = m.r(s, a) + m.gamma * exp_next;
        }
    }
    return out;
}

SolveResult value_iteration(const TabularMdp& m, const OperatorSpec& spec, double tol,
                            int max_iters, const QTable* q0) {
    if (!(tol > 0.0)) throw std::invalid_argument("tol must be > 0");
    if (max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");

    SolveResult res;
    res.q = q0 ? *q0 : QTable::zeros(m.n_states, m.n_actions);
    require_shapes(m, res.q);
    for (double v : res.q.values)
        if (std::abs(v) > m.r_max)
            throw std::invalid_argument("initial QTable entries must lie in [-r_max, r_max]");

    for (int k = 0; k < max_iters; ++k) {
        QTable next = generalized_backup(m, res.q, spec);
        const double residual = sup_norm_diff(next, res.q);
        res.residual_history.push_back(residual);
        res.q = std::move(next);
        res.iterations = k + 1;
        if (residual <= tol) {
            res.converged = true;
            break;
        }
    }
    return res;
}

QTable exact_q_star(const TabularMdp& m, double tol) {
    SolveResult res = value_iteration(m, OperatorSpec::max(), tol);
    if (!res.converged) throw std::runtime_error("max-backup value iteration did not converge");
    return std::move(res.q);
}

Policy greedy_policy(const QTable& q) {
    for (double v : q.values)
        if (!std::isfinite(v)) throw std::invalid_argument("QTable has a non-finite entry");
    Policy p;
    p.action.resize(static_cast<std::size_t>(q.n_states));
    for (int s = 0; s < q.n_states; ++s)
        p.action[static_cast<std::size_t>(s)] = argmax_lowest(q.row(s));
    return p;
}

QTable policy_evaluation(const TabularMdp& m, const Policy& p, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("tol must be > 0");
    if (p.action.size() != static_cast<std::size_t>(m.n_states))
        throw std::invalid_argument("policy length does not match the MDP");
    for (int s = 0; s < m.n_states; ++s) {
        const int a = p.action[static_cast<std::size_t>(s)];
        if (a < 0 || a >= m.n_actions) throw std::invalid_argument("policy has an invalid action");
    }

    QTable q = QTable::zeros(m.n_states, m.n_actions);
    std::vector<double> chosen(static_cast<std::size_t>(m.n_states), 0.0);
    for (long long k = 0;; ++k) {
        for (int s = 0; s < m.n_states; ++s)
            chosen[static_cast<std::size_t>(s)] = q.at(s, p.action[static_cast<std::size_t>(s)]);
        QTable next = QTable::zeros(m.n_states, m.n_actions);
        for (int s = 0; s < m.n_states; ++s) {
            for (int a = 0; a < m.n_actions; ++a) {
                auto row = m.transition_row(s, a);
                double exp_next = 0.0;
                for (int s2 = 0; s2 < m.n_states; ++s2) {
                    const double pr = row[static_cast<std::size_t>(s2)];
                    if (pr > 0.0) exp_next += pr * chosen[static_cast<std::size_t>(s2)];
                }
                next.at(s, a) = m.r(s, a) + m.gamma * exp_next;
            }
        }
        const double residual = sup_norm_diff(next, q);
        q = std::move(next);
        if (residual <= tol) break;
        if (k > 10000000) throw std::runtime_error("policy evaluation did not converge");
    }
    return q;
}

void TargetRule::validate() const {
    switch (kind) {
        case TargetKind::max_target:
        case TargetKind::double_target:
            return;
        case TargetKind::mellowmax_target:
            OperatorSpec::mellowmax(omega).validate();
            return;
        case TargetKind::sm2_target:
            OperatorSpec::sm2(alpha, omega).validate();
            return;
    }
    throw std::invalid_argument("unknown target rule");
}

std::string TargetRule::name() const {
    switch (kind) {
        case TargetKind::max_target: return "max_target";
        case TargetKind::double_target: return "double_target";
        case TargetKind::mellowmax_target:
            return "mellowmax_target(" + std::to_string(omega) + ")";
        case TargetKind::sm2_target:
            return "sm2_target(" + std::to_string(alpha) + "," + std::to_string(omega) + ")";
    }
    return "?";
}

double EpsilonSchedule::at(long long step) const {
    if (decay_steps <= 0 || step >= decay_steps) return end;
    const double t = static_cast<double>(step) / static_cast<double>(decay_steps);
    return start + (end - start) * t;
}

void EpsilonSchedule::validate() const {
    if (!(start >= 0.0 && start <= 1.0 && end >= 0.0 && end <= 1.0))
        throw std::invalid_argument("epsilon schedule must stay in [0, 1]");
    if (decay_steps < 0) throw std::invalid_argument("decay_steps must be >= 0");
}

QLearnResult q_learning(const TabularMdp& m, const TargetRule& rule, const QLearnParams& params) {
    rule.validate();
    params.epsilon.validate();
    if (params.steps < 1) throw std::invalid_argument("steps must be >= 1");
    if (!(params.lr > 0.0 && params.lr <= 1.0))
        throw std::invalid_argument("lr must lie in (0, 1]");
    if (params.target_sync_period < 1)
        throw std::invalid_argument("target_sync_period must be >= 1");
    if (params.bias_record_period < 1)
        throw std::invalid_argument("bias_record_period must be >= 1");

    const QTable q_star = exact_q_star(m, params.q_star_tol);

    QTable online = QTable::zeros(m.n_states, m.n_actions);
    QTable frozen = online;
    Rng rng(mix64(params.seed));

    // Initial state from initial_dist; the task is continuing, no resets.
    int state = sample_next_state(m.initial_dist, rng);

    QLearnResult res;
    const double entries =
        static_cast<double>(m.n_states) * static_cast<double>(m.n_actions);

    auto target_for = [&](int s2) {
        switch (rule.kind) {
            case TargetKind::max_target:
                return max_value(frozen.row(s2));
            case TargetKind::double_target:
                return frozen.at(s2, argmax_lowest(online.row(s2)));
            case TargetKind::mellowmax_target:
                return mellowmax(frozen.row(s2), rule.omega);
            case TargetKind::sm2_target:
                return soft_mellowmax(frozen.row(s2), rule.alpha, rule.omega);
        }
        throw std::invalid_argument("unknown target rule");
    };

    for (long long step = 0; step < params.steps; ++step) {
        const double eps = params.epsilon.at(step);
        int action;
        if (rng.uniform01() < eps)
            action = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(m.n_actions)));
        else
            action = argmax_lowest(online.row(state));

        const int next = sample_next_state(m.transition_row(state, action), rng);
        const double target = m.r(state, action) + m.gamma * target_for(next);
        online.at(state, action) += params.lr * (target - online.at(state, action));
        state = next;

        if ((step + 1) % params.target_sync_period == 0) frozen = online;
        if ((step + 1) % params.bias_record_period == 0) {
            double acc = 0.0;
            for (std::size_t i = 0; i < online.values.size(); ++i)
                acc += online.values[i] - q_star.values[i];
            res.bias_trace.push_back({step + 1, acc / entries});
        }
    }
    res.q = std::move(online);
    return res;
}

BiasSummary estimation_bias(const QTable& q, const QTable& q_star) {
    if (q.n_states != q_star.n_states || q.n_actions != q_star.n_actions ||
        q.values.size() != q_star.values.size())
        throw std::invalid_argument("QTable shapes differ");
    BiasSummary b;
    b.per_state_action = QTable::zeros(q.n_states, q.n_actions);
    double acc = 0.0;
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < q.values.size(); ++i) {
        const double d = q.values[i] - q_star.values[i];
        b.per_state_action.values[i] = d;
        acc += d;
        worst = std::max(worst, d);
    }
    b.mean = acc / static_cast<double>(q.values.size());
    b.max = worst;
    return b;
}

}  // namespace smx
