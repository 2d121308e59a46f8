#include "smx/theory.hpp"

#include <cmath>
#include <stdexcept>

#include "smx/operators.hpp"
#include "smx/rng.hpp"

namespace smx {

namespace {

constexpr long long kScanChunk = 4096;
constexpr double kRatioTol = 1e-9;
constexpr double kDenomFloor = 1e-12;

void require_omega(double omega) {
    if (!std::isfinite(omega) || omega <= 0.0) throw std::invalid_argument("omega must be > 0");
}

void require_gamma(double gamma) {
    if (!std::isfinite(gamma) || gamma < 0.0 || gamma >= 1.0)
        throw std::invalid_argument("gamma must lie in [0, 1)");
}

void require_nonneg_alpha(double alpha) {
    if (!std::isfinite(alpha) || alpha < 0.0)
        throw std::invalid_argument("alpha must be >= 0 for bound computations");
}

void require_actions(int n) {
    if (n < 1) throw std::invalid_argument("n must be >= 1");
}

}  // namespace

ContractionRange contraction_range_from_spread(double omega, double c) {
    require_omega(omega);
    if (!std::isfinite(c) || c <= 0.0) throw std::invalid_argument("c must be > 0");
    ContractionRange r;
    r.c = c;
    // expm1 keeps both endpoints accurate for small c*omega and avoids
    // overflow in e^{c*omega} for large products.
    r.alpha_max = omega / std::expm1(c * omega);
    r.alpha_min = omega / std::expm1(-c * omega);
    return r;
}

ContractionRange alpha_contraction_range(double omega, double r_max, double gamma) {
    require_gamma(gamma);
    if (!std::isfinite(r_max) || r_max <= 0.0) throw std::invalid_argument("r_max must be > 0");
    return contraction_range_from_spread(omega, 2.0 * r_max / (1.0 - gamma));
}

double xi_upper_bound(double alpha, double omega, int n) {
    require_omega(omega);
    require_nonneg_alpha(alpha);
    require_actions(n);
    const double nd = static_cast<double>(n);
    if (alpha >= omega) return std::log((1.0 + nd) / 2.0) / omega;
    return std::log(nd - alpha * (nd - 1.0) / (alpha + omega)) / omega;
}

BoundReport xi_and_performance_bounds(double alpha, double omega, double gamma, int n) {
    require_gamma(gamma);
    BoundReport b;
    b.regime = alpha >= omega ? BoundRegime::alpha_ge_omega : BoundRegime::alpha_lt_omega;
    b.xi_bound = xi_upper_bound(alpha, omega, n);
    b.performance_bound = gamma / (1.0 - gamma) * b.xi_bound;
    b.reduction_bound = b.xi_bound;
    return b;
}

BoundReport mellowmax_bounds(double omega, double gamma, int n) {
    require_omega(omega);
    require_gamma(gamma);
    require_actions(n);
    BoundReport b;
    b.regime = BoundRegime::alpha_lt_omega;
    b.xi_bound = std::log(static_cast<double>(n)) / omega;
    b.performance_bound = gamma / (1.0 - gamma) * b.xi_bound;
    b.reduction_bound = b.xi_bound;
    return b;
}

double gap_kernel_max(double alpha, double omega) {
    require_omega(omega);
    require_nonneg_alpha(alpha);
    if (alpha >= omega) return 0.5;
    return omega / (alpha + omega);
}

MarlBoundReport marl_bounds(double epsilon, double l, double L, int n_agents, int n_actions,
                            double alpha, double omega) {
    if (!std::isfinite(epsilon) || epsilon <= 0.0) throw std::invalid_argument("epsilon must be > 0");
    if (!std::isfinite(l) || l < 0.0) throw std::invalid_argument("l must be >= 0");
    if (!std::isfinite(L) || L <= 0.0) throw std::invalid_argument("L must be > 0");
    if (L < l) throw std::invalid_argument("mixing bounds require l <= L");
    if (n_agents < 1) throw std::invalid_argument("n_agents must be >= 1");
    require_actions(n_actions);

    MarlBoundReport r;
    r.n_agents = n_agents;
    r.n_actions = n_actions;
    r.l = l;
    r.L = L;
    r.epsilon = epsilon;
    const double nd = static_cast<double>(n_actions);
    const double factor = epsilon * static_cast<double>(n_agents) * (nd - 1.0) / (nd + 1.0);
    r.theta1_low = l * factor;
    r.theta1_high = L * factor;
    r.reduction_high =
        L * static_cast<double>(n_agents) * xi_upper_bound(alpha, omega, n_actions);
    return r;
}

namespace {

void rate_pair(std::span<const double> q1, std::span<const double> q2, double alpha, double omega,
               ScanReport* report) {
    double denom = 0.0;
    for (std::size_t i = 0; i < q1.size(); ++i) denom = std::max(denom, std::abs(q1[i] - q2[i]));
    const double num = std::abs(soft_mellowmax(q1, alpha, omega) - soft_mellowmax(q2, alpha, omega));
    const double ratio = num / denom;
    report->trials += 1;
    if (ratio > 1.0 + kRatioTol) report->violations += 1;
    if (ratio > report->worst_ratio) report->worst_ratio = ratio;
}

}  // namespace

ScanReport contraction_scan(double alpha, double omega, double c, int n, long long trials,
                            std::uint64_t seed, std::span<const QPair> injected) {
    require_omega(omega);
    if (!std::isfinite(alpha)) throw std::invalid_argument("alpha must be finite");
    if (!std::isfinite(c) || c <= 0.0) throw std::invalid_argument("c must be > 0");
    if (n < 2) throw std::invalid_argument("scan needs n >= 2");
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");

    ScanReport report;
    for (const QPair& p : injected) {
        if (p.q1.size() != static_cast<std::size_t>(n) || p.q2.size() != static_cast<std::size_t>(n))
            throw std::invalid_argument("injected pair length differs from n");
        rate_pair(p.q1, p.q2, alpha, omega, &report);
    }

    const double half = c / 2.0;
    std::vector<double> q1(static_cast<std::size_t>(n));
    std::vector<double> q2(static_cast<std::size_t>(n));
    const long long chunks = (trials + kScanChunk - 1) / kScanChunk;
    for (long long k = 0; k < chunks; ++k) {
        Rng rng(chunk_seed(seed, static_cast<std::uint64_t>(k)));
        const long long in_chunk = std::min(kScanChunk, trials - k * kScanChunk);
        for (long long t = 0; t < in_chunk; ++t) {
            // Degenerate pairs (denominator < 1e-12) are redrawn from the
            // same stream, so the scan stays a function of (seed, k).
            double denom = 0.0;
            do {
                rng.fill_uniform(q1, -half, half);
                rng.fill_uniform(q2, -half, half);
                denom = 0.0;
                for (int i = 0; i < n; ++i)
                    denom = std::max(denom, std::abs(q1[static_cast<std::size_t>(i)] -
                                                     q2[static_cast<std::size_t>(i)]));
            } while (denom < kDenomFloor);
            rate_pair(q1, q2, alpha, omega, &report);
        }
    }
    return report;
}

}  // namespace smx
