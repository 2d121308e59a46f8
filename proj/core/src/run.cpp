#include "smx/run.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <deque>
#include <sstream>

#include "smx/mdp.hpp"
#include "smx/overestimation.hpp"
#include "smx/solve.hpp"
#include "smx/theory.hpp"

namespace smx {

namespace {

using Clock = std::chrono::steady_clock;

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string join_list(const std::vector<double>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += '|';
        out += num(xs[i]);
    }
    return out;
}

// Accumulates `key=value` pairs for the params column.
class ParamEcho {
  public:
    ParamEcho& add(const std::string& key, const std::string& value) {
        if (!text_.empty()) text_ += ';';
        text_ += key + "=" + value;
        return *this;
    }
    ParamEcho& add(const std::string& key, double value) { return add(key, num(value)); }
    ParamEcho& add(const std::string& key, long long value) {
        return add(key, std::to_string(value));
    }
    ParamEcho& add(const std::string& key, int value) { return add(key, std::to_string(value)); }
    const std::string& str() const { return text_; }

  private:
    std::string text_;
};

class Recorder {
  public:
    explicit Recorder(const ExperimentConfig& cfg)
        : command_(command_name(cfg.command)), start_(Clock::now()) {}

    // Returned references stay valid for the lifetime of the Recorder
    // (deque storage), so callers may fill optional fields after later emits.
    ResultRecord& emit(const std::string& metric, double value, const std::string& params) {
        ResultRecord r;
        r.command = command_;
        r.metric = metric;
        r.value = value;
        r.params = params;
        r.wall_time_ms =
            std::chrono::duration<double, std::milli>(Clock::now() - start_).count();
        records_.push_back(std::move(r));
        return records_.back();
    }

    std::vector<ResultRecord> take() { return {records_.begin(), records_.end()}; }

  private:
    std::string command_;
    Clock::time_point start_;
    std::deque<ResultRecord> records_;
};

TabularMdp make_mdp(const ExperimentConfig& cfg) {
    if (!cfg.mdp_file.empty()) return load_mdp(cfg.mdp_file);
    if (cfg.generator == "random")
        return random_mdp(cfg.n_states, cfg.n_actions, cfg.branching, cfg.mdp_seed, cfg.gamma,
                          cfg.r_max);
    if (cfg.generator == "chain") return chain_mdp(cfg.chain_length, cfg.slip, cfg.gamma);
    throw ConfigError("unknown mdp generator '" + cfg.generator + "' (expected random|chain)");
}

ParamEcho mdp_echo(const ExperimentConfig& cfg) {
    ParamEcho p;
    if (!cfg.mdp_file.empty()) {
        p.add("mdp_file", cfg.mdp_file);
    } else if (cfg.generator == "chain") {
        p.add("generator", std::string("chain"))
            .add("chain_length", cfg.chain_length)
            .add("slip", cfg.slip)
            .add("gamma", cfg.gamma);
    } else {
        p.add("generator", std::string("random"))
            .add("n_states", cfg.n_states)
            .add("n_actions", cfg.n_actions)
            .add("branching", cfg.branching)
            .add("mdp_seed", static_cast<long long>(cfg.mdp_seed))
            .add("gamma", cfg.gamma)
            .add("r_max", cfg.r_max);
    }
    return p;
}

MixerSpec make_mixer(const ExperimentConfig& cfg) {
    MixerSpec mixer;
    if (!cfg.weights.empty())
        mixer.weights = cfg.weights;
    else
        mixer.weights.assign(static_cast<std::size_t>(cfg.n_agents), 1.0);
    mixer.validate();
    return mixer;
}

void run_bounds(const ExperimentConfig& cfg, Recorder& rec) {
    const OperatorSpec spec = cfg.operator_spec();
    ParamEcho p;
    p.add("kind", spec.name())
        .add("alpha", cfg.alpha)
        .add("omega", cfg.omega)
        .add("gamma", cfg.gamma)
        .add("r_max", cfg.r_max)
        .add("n", cfg.n);

    const ContractionRange range = alpha_contraction_range(cfg.omega, cfg.r_max, cfg.gamma);
    rec.emit("c", range.c, p.str());
    rec.emit("alpha_min", range.alpha_min, p.str());
    rec.emit("alpha_max", range.alpha_max, p.str());
    rec.emit("alpha_in_contraction_range", range.contains(cfg.alpha) ? 1.0 : 0.0, p.str()).pass =
        range.contains(cfg.alpha);

    const BoundReport b = xi_and_performance_bounds(cfg.alpha, cfg.omega, cfg.gamma, cfg.n);
    rec.emit("regime_alpha_ge_omega", b.regime == BoundRegime::alpha_ge_omega ? 1.0 : 0.0,
             p.str());
    rec.emit("xi_bound", b.xi_bound, p.str());
    rec.emit("performance_bound", b.performance_bound, p.str());
    rec.emit("reduction_bound", b.reduction_bound, p.str());

    const BoundReport mm = mellowmax_bounds(cfg.omega, cfg.gamma, cfg.n);
    rec.emit("mellowmax_xi_bound", mm.xi_bound, p.str());
    rec.emit("mellowmax_performance_bound", mm.performance_bound, p.str());

    const MarlBoundReport marl = marl_bounds(cfg.epsilon, 1.0, 1.0, cfg.n_agents, cfg.n,
                                             cfg.alpha, cfg.omega);
    rec.emit("theta1_low_unit_mixing", marl.theta1_low, p.str());
    rec.emit("theta1_high_unit_mixing", marl.theta1_high, p.str());
}

void run_contract(const ExperimentConfig& cfg, Recorder& rec, bool* failed) {
    ParamEcho p;
    p.add("alpha", cfg.alpha)
        .add("omega", cfg.omega)
        .add("c", cfg.c)
        .add("scan_n", cfg.scan_n)
        .add("trials", cfg.samples)
        .add("seed", static_cast<long long>(cfg.seed));

    std::vector<QPair> injected;
    if (!cfg.inject_q1.empty()) {
        injected.push_back({cfg.inject_q1, cfg.inject_q2});
        p.add("inject_q1", join_list(cfg.inject_q1)).add("inject_q2", join_list(cfg.inject_q2));
    }
    const ScanReport scan =
        contraction_scan(cfg.alpha, cfg.omega, cfg.c, cfg.scan_n, cfg.samples, cfg.seed, injected);
    rec.emit("trials", static_cast<double>(scan.trials), p.str());
    const bool pass = scan.violations == 0;
    rec.emit("violations", static_cast<double>(scan.violations), p.str()).pass = pass;
    rec.emit("worst_ratio", scan.worst_ratio, p.str());
    if (!pass) *failed = true;
}

void run_plan(const ExperimentConfig& cfg, Recorder& rec) {
    const TabularMdp mdp = make_mdp(cfg);
    const OperatorSpec spec = cfg.operator_spec();
    ParamEcho p = mdp_echo(cfg);
    p.add("kind", spec.name()).add("tol", cfg.tol);

    const QTable q_star = exact_q_star(mdp, cfg.tol);
    const SolveResult solved = value_iteration(mdp, spec, cfg.tol, cfg.max_iters);
    rec.emit("iterations", static_cast<double>(solved.iterations), p.str());
    rec.emit("converged", solved.converged ? 1.0 : 0.0, p.str()).pass = solved.converged;

    const double gap = sup_norm_diff(q_star, solved.q);
    ResultRecord& gap_rec = rec.emit("gap_sup", gap, p.str());
    if (spec.kind == OperatorKind::sm2) {
        const BoundReport b =
            xi_and_performance_bounds(cfg.alpha, cfg.omega, mdp.gamma, mdp.n_actions);
        gap_rec.bound = b.performance_bound;
        gap_rec.pass = gap <= b.performance_bound;
        rec.emit("performance_bound", b.performance_bound, p.str());
    } else if (spec.kind == OperatorKind::mellowmax) {
        const BoundReport b = mellowmax_bounds(cfg.omega, mdp.gamma, mdp.n_actions);
        gap_rec.bound = b.performance_bound;
        gap_rec.pass = gap <= b.performance_bound;
        rec.emit("performance_bound", b.performance_bound, p.str());
    }

    if (!cfg.out_svg.empty()) {
        Series residuals{"residual " + spec.name(), {}};
        for (std::size_t k = 0; k < solved.residual_history.size(); ++k)
            residuals.points.emplace_back(static_cast<double>(k + 1),
                                          solved.residual_history[k]);
        if (residuals.points.size() >= 2)
            emit_svg(std::vector<Series>{residuals}, cfg.out_svg, "iteration",
                     "sup-norm residual");
    }
}

void run_qlearn(const ExperimentConfig& cfg, Recorder& rec) {
    const TabularMdp mdp = make_mdp(cfg);
    const TargetRule rule = cfg.target_rule();
    QLearnParams params;
    params.steps = cfg.steps;
    params.lr = cfg.lr;
    params.epsilon = {cfg.eps_start, cfg.eps_end, cfg.eps_decay_steps};
    params.target_sync_period = cfg.sync_period;
    params.seed = cfg.seed;
    params.bias_record_period = cfg.bias_period;
    params.q_star_tol = cfg.tol;

    ParamEcho base = mdp_echo(cfg);
    base.add("rule", rule.name())
        .add("steps", cfg.steps)
        .add("lr", cfg.lr)
        .add("eps_start", cfg.eps_start)
        .add("eps_end", cfg.eps_end)
        .add("eps_decay_steps", cfg.eps_decay_steps)
        .add("sync_period", cfg.sync_period)
        .add("seed", static_cast<long long>(cfg.seed));

    const QLearnResult result = q_learning(mdp, rule, params);
    for (const BiasPoint& pt : result.bias_trace) {
        ParamEcho p = base;
        p.add("step", pt.step);
        rec.emit("mean_bias", pt.mean_bias, p.str());
    }
    const QTable q_star = exact_q_star(mdp, cfg.tol);
    const BiasSummary bias = estimation_bias(result.q, q_star);
    rec.emit("terminal_mean_bias", bias.mean, base.str());
    rec.emit("terminal_max_bias", bias.max, base.str());

    if (!cfg.out_svg.empty() && result.bias_trace.size() >= 2) {
        Series curve{"mean bias " + rule.name(), {}};
        for (const BiasPoint& pt : result.bias_trace)
            curve.points.emplace_back(static_cast<double>(pt.step), pt.mean_bias);
        emit_svg(std::vector<Series>{curve}, cfg.out_svg, "step", "mean bias");
    }
}

void run_overest(const ExperimentConfig& cfg, Recorder& rec) {
    const OperatorSpec spec = cfg.operator_spec();
    const ErrorModel model{cfg.n, cfg.epsilon, cfg.samples, cfg.seed};
    ParamEcho p;
    p.add("kind", spec.name())
        .add("alpha", cfg.alpha)
        .add("omega", cfg.omega)
        .add("n", cfg.n)
        .add("epsilon", cfg.epsilon)
        .add("samples", cfg.samples)
        .add("seed", static_cast<long long>(cfg.seed));

    const double analytic = analytic_theta_max(cfg.n, cfg.epsilon);
    rec.emit("theta_max_analytic", analytic, p.str());

    const ThetaEstimate mc_max = sample_theta(model, OperatorSpec::max());
    ResultRecord& max_rec = rec.emit("theta_max_mc", mc_max.mean, p.str());
    max_rec.std_error = mc_max.std_error;
    max_rec.bound = analytic;
    max_rec.pass = std::abs(mc_max.mean - analytic) <= 3.0 * mc_max.std_error;

    const ThetaEstimate mc_op = sample_theta(model, spec);
    rec.emit("theta_operator_mc", mc_op.mean, p.str()).std_error = mc_op.std_error;

    if (spec.kind == OperatorKind::sm2 || spec.kind == OperatorKind::mellowmax) {
        const ReductionEstimate red = paired_theta_reduction(model, spec);
        ResultRecord& r = rec.emit("reduction_mean", red.reduction_mean, p.str());
        r.std_error = red.std_error;
        r.bound = red.bound;
        r.pass = red.within_bound;
    }
}

void run_marl_overest(const ExperimentConfig& cfg, Recorder& rec) {
    const OperatorSpec spec = cfg.operator_spec();
    const MixerSpec mixer = make_mixer(cfg);
    const ErrorModel model{cfg.n, cfg.epsilon, cfg.samples, cfg.seed};
    ParamEcho p;
    p.add("kind", spec.name())
        .add("alpha", cfg.alpha)
        .add("omega", cfg.omega)
        .add("n", cfg.n)
        .add("epsilon", cfg.epsilon)
        .add("samples", cfg.samples)
        .add("seed", static_cast<long long>(cfg.seed))
        .add("weights", join_list(mixer.weights));

    const MarlBoundReport bounds =
        marl_bounds(cfg.epsilon, mixer.min_weight(), mixer.max_weight(), mixer.n_agents(), cfg.n,
                    cfg.alpha, cfg.omega);
    rec.emit("theta1_low", bounds.theta1_low, p.str());
    rec.emit("theta1_high", bounds.theta1_high, p.str());

    const ThetaEstimate mixed_max = marl_sample_theta(model, mixer, OperatorSpec::max());
    ResultRecord& max_rec = rec.emit("theta1_mc", mixed_max.mean, p.str());
    max_rec.std_error = mixed_max.std_error;
    max_rec.pass = mixed_max.mean >= bounds.theta1_low - 3.0 * mixed_max.std_error &&
                   mixed_max.mean <= bounds.theta1_high + 3.0 * mixed_max.std_error;

    const ThetaEstimate mixed_op = marl_sample_theta(model, mixer, spec);
    rec.emit("theta1_operator_mc", mixed_op.mean, p.str()).std_error = mixed_op.std_error;

    if (spec.kind == OperatorKind::sm2 || spec.kind == OperatorKind::mellowmax) {
        const ReductionEstimate red = marl_paired_reduction(model, mixer, spec);
        ResultRecord& r = rec.emit("marl_reduction_mean", red.reduction_mean, p.str());
        r.std_error = red.std_error;
        r.bound = red.bound;
        r.pass = red.within_bound;
    }
}

void run_sweep(const ExperimentConfig& cfg, Recorder& rec) {
    // Grid order is alphas outer, omegas inner; record order follows it.
    TabularMdp mdp;
    QTable q_star;
    if (cfg.sweep_solve) {
        mdp = make_mdp(cfg);
        q_star = exact_q_star(mdp, cfg.tol);
    }

    std::vector<Series> curves;
    for (double omega : cfg.sweep_omegas)
        curves.push_back({"omega=" + num(omega), {}});

    for (double alpha : cfg.sweep_alphas) {
        for (std::size_t wi = 0; wi < cfg.sweep_omegas.size(); ++wi) {
            const double omega = cfg.sweep_omegas[wi];
            ParamEcho p;
            p.add("alpha", alpha).add("omega", omega).add("gamma", cfg.gamma).add("n", cfg.n);
            const BoundReport b = xi_and_performance_bounds(alpha, omega, cfg.gamma, cfg.n);
            rec.emit("xi_bound", b.xi_bound, p.str());
            rec.emit("performance_bound", b.performance_bound, p.str());
            curves[wi].points.emplace_back(alpha, b.performance_bound);

            if (cfg.sweep_solve) {
                ParamEcho ps = mdp_echo(cfg);
                ps.add("alpha", alpha).add("omega", omega).add("tol", cfg.tol);
                const SolveResult solved = value_iteration(
                    mdp, OperatorSpec::sm2(alpha, omega), cfg.tol, cfg.max_iters);
                const double gap = sup_norm_diff(q_star, solved.q);
                const BoundReport mb =
                    xi_and_performance_bounds(alpha, omega, mdp.gamma, mdp.n_actions);
                ResultRecord& r = rec.emit("gap_sup", gap, ps.str());
                r.bound = mb.performance_bound;
                r.pass = gap <= mb.performance_bound;
            }
        }
    }

    if (!cfg.out_svg.empty() && cfg.sweep_alphas.size() >= 2)
        emit_svg(curves, cfg.out_svg, "alpha", "performance bound");
}

}  // namespace

RunOutcome run(const ExperimentConfig& config) {
    config.validate();
    Recorder rec(config);
    RunOutcome outcome;

    switch (config.command) {
        case Command::bounds: run_bounds(config, rec); break;
        case Command::contract: run_contract(config, rec, &outcome.checks_failed); break;
        case Command::plan: run_plan(config, rec); break;
        case Command::qlearn: run_qlearn(config, rec); break;
        case Command::overest: run_overest(config, rec); break;
        case Command::marl_overest: run_marl_overest(config, rec); break;
        case Command::sweep: run_sweep(config, rec); break;
    }

    outcome.records = rec.take();
    if (!config.out_csv.empty()) write_csv(outcome.records, config.out_csv);
    return outcome;
}

}  // namespace smx
