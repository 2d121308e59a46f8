#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace smx {

// Interval of sm2 alpha values for which the soft-mellowmax Bellman backup
// is a gamma-contraction, given the value-spread constant
// c = 2 * r_max / (1 - gamma):
//   alpha_min = -omega / (1 - e^{-c*omega}),  alpha_max = omega / (e^{c*omega} - 1).
struct ContractionRange {
    double c = 0.0;
    double alpha_min = 0.0;
    double alpha_max = 0.0;

    bool contains(double alpha) const { return alpha_min <= alpha && alpha <= alpha_max; }
};

// Range from the reward bound and discount; c = 2*r_max/(1-gamma).
ContractionRange alpha_contraction_range(double omega, double r_max, double gamma);

// Range from the value-spread constant directly.
ContractionRange contraction_range_from_spread(double omega, double c);

enum class BoundRegime { alpha_ge_omega, alpha_lt_omega };

// Closed-form bounds tied to one (alpha, omega, gamma, n) point:
//   xi_bound          = (1/omega) log((1+n)/2)                      if alpha >= omega
//                     = (1/omega) log(n - alpha(n-1)/(alpha+omega)) if alpha <  omega
//   performance_bound = gamma/(1-gamma) * xi_bound   (sup-norm gap of the
//                       converged soft backup fixed point from Q*)
//   reduction_bound   = xi_bound   (upper end of the overestimation
//                       reduction interval)
struct BoundReport {
    BoundRegime regime = BoundRegime::alpha_lt_omega;
    double xi_bound = 0.0;
    double performance_bound = 0.0;
    double reduction_bound = 0.0;
};

// Supremum of max(q) - soft_mellowmax(q, alpha, omega) over length-n vectors;
// requires alpha >= 0.
double xi_upper_bound(double alpha, double omega, int n);

BoundReport xi_and_performance_bounds(double alpha, double omega, double gamma, int n);

// Mellowmax analog: xi_bound = (1/omega) log n.
BoundReport mellowmax_bounds(double omega, double gamma, int n);

// Envelope of the per-action gap kernel e^{omega*x} / (e^{(alpha+omega)*x} + 1)
// over x >= 0: omega/(alpha+omega) when alpha < omega, else 1/2. The numeric
// maximum never exceeds this value.
double gap_kernel_max(double alpha, double omega);

// Overestimation interval ends under monotone linear mixing of n_agents
// per-agent values with weights in [l, L]:
//   theta1 in [eps*l*N*(n-1)/(n+1), eps*L*N*(n-1)/(n+1)]
// and the upper end of the sm2 reduction interval, (L*N/omega) * log-term.
struct MarlBoundReport {
    double theta1_low = 0.0;
    double theta1_high = 0.0;
    double reduction_high = 0.0;
    int n_agents = 0;
    int n_actions = 0;
    double l = 0.0;
    double L = 0.0;
    double epsilon = 0.0;
};

MarlBoundReport marl_bounds(double epsilon, double l, double L, int n_agents, int n_actions,
                            double alpha, double omega);

// Extra value-vector pairs evaluated ahead of the random trials of a
// contraction scan.
struct QPair {
    std::vector<double> q1;
    std::vector<double> q2;
};

struct ScanReport {
    long long trials = 0;
    long long violations = 0;   // ratios exceeding 1 + 1e-9
    double worst_ratio = 0.0;
};

// Samples `trials` pairs (Q1, Q2) uniformly from [-c/2, c/2]^n and measures
//   |sm(Q1) - sm(Q2)| / max_i |Q1[i] - Q2[i]|,
// resampling pairs whose denominator is below 1e-12. Samples are drawn in
// fixed chunks seeded by chunk_seed(seed, k), so the report is a pure
// function of the arguments. Injected pairs are rated first and count
// toward trials/violations/worst_ratio.
ScanReport contraction_scan(double alpha, double omega, double c, int n, long long trials,
                            std::uint64_t seed, std::span<const QPair> injected = {});

}  // namespace smx
