#pragma once

#include <cstdint>
#include <vector>

#include "smx/operators.hpp"

namespace smx {

// Estimation-error model: n action-value errors, i.i.d. uniform on
// [-epsilon, epsilon] (the sampler draws from the half-open
// [-epsilon, epsilon); the endpoint carries no mass), with the true values
// normalized to zero -- every operator here is shift invariant, so only
// the errors matter.
struct ErrorModel {
    int n = 1;
    double epsilon = 1.0;
    long long samples = 100000;
    std::uint64_t seed = 0;

    void validate() const;
};

// Monotone linear mixing: Q_tot = sum_i weights[i] * Q_i, so the partial
// derivative w.r.t. each per-agent value is the weight itself.
struct MixerSpec {
    std::vector<double> weights;

    int n_agents() const { return static_cast<int>(weights.size()); }
    double min_weight() const;
    double max_weight() const;
    void validate() const;  // requires >= 1 agent, weights in [0, inf), max > 0
};

struct ThetaEstimate {
    double mean = 0.0;
    double std_error = 0.0;  // sample std / sqrt(samples)
    long long samples = 0;
};

// Closed form for E[max of n i.i.d. uniform errors]: epsilon * (n-1)/(n+1).
double analytic_theta_max(int n, double epsilon);

// Monte Carlo estimate of E[op(Z)], Z ~ Uniform[-eps, eps]^n. Samples are
// drawn in fixed chunks seeded by chunk_seed(seed, k) and partial moments
// are merged in chunk order with compensated summation, so the estimate is
// a pure function of (model, spec).
ThetaEstimate sample_theta(const ErrorModel& model, const OperatorSpec& spec);

struct ReductionEstimate {
    double reduction_mean = 0.0;  // E[max(Z) - op(Z)], paired samples
    double std_error = 0.0;
    double bound = 0.0;           // upper end of the reduction interval
    bool within_bound = false;    // 0 < mean <= bound + 3 * std_error
};

// Paired estimate of the overestimation reduction E[max(Z) - op(Z)] using
// common random numbers; spec must be mellowmax or sm2 with alpha >= 0.
// n = 1 degenerates to reduction 0, bound 0, within_bound = true.
ReductionEstimate paired_theta_reduction(const ErrorModel& model, const OperatorSpec& spec);

// Mixed multi-agent overestimation: draws an independent error vector per
// agent and averages sum_i w_i * op(Z_i). spec may be any operator,
// including max (giving the mixed max-overestimation itself).
ThetaEstimate marl_sample_theta(const ErrorModel& model, const MixerSpec& mixer,
                                const OperatorSpec& spec);

// Paired mixed reduction sum_i w_i * (max(Z_i) - op(Z_i)) with bound
// max_weight * N * xi_upper_bound (log(n)-based for mellowmax).
ReductionEstimate marl_paired_reduction(const ErrorModel& model, const MixerSpec& mixer,
                                        const OperatorSpec& spec);

}  // namespace smx
