#include "smx/operators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace smx {

namespace {

void require_q(std::span<const double> q) {
    if (q.empty()) throw std::domain_error("action-value vector must have n >= 1");
    for (double v : q) {
        if (!std::isfinite(v)) throw std::domain_error("action-value vector has a non-finite entry");
    }
}

void require_finite_param(double v, const char* name) {
    if (!std::isfinite(v)) throw std::invalid_argument(std::string(name) + " must be finite");
}

void require_positive_omega(double omega) {
    require_finite_param(omega, "omega");
    if (omega <= 0.0) throw std::invalid_argument("omega must be > 0");
}

// Entries closer together than 1e-15 * max(1, |q|_inf) are treated as a
// constant vector; every operator maps those to the common value.
bool nearly_constant(std::span<const double> q, double* value) {
    const auto [lo, hi] = std::minmax_element(q.begin(), q.end());
    double scale = std::max(1.0, std::max(std::abs(*lo), std::abs(*hi)));
    if (*hi - *lo < 1e-15 * scale) {
        *value = *hi;
        return true;
    }
    return false;
}

// Every soft operator here is a weighted quasi-mean, so its exact value
// lies in [min(q), max(q)]; pin the rounded result to that envelope (the
// log-sum-exp difference can otherwise land an ulp above the maximum).
double pin_to_range(std::span<const double> q, double v) {
    const auto [lo, hi] = std::minmax_element(q.begin(), q.end());
    return std::clamp(v, *lo, *hi);
}

}  // namespace

void OperatorSpec::validate() const {
    switch (kind) {
        case OperatorKind::max:
        case OperatorKind::mean:
            return;
        case OperatorKind::boltzmann:
            require_finite_param(omega, "omega");
            if (omega < 0.0) throw std::invalid_argument("omega must be >= 0 for boltzmann");
            return;
        case OperatorKind::mellowmax:
            require_positive_omega(omega);
            return;
        case OperatorKind::sm2:
            require_positive_omega(omega);
            require_finite_param(alpha, "alpha");
            return;
    }
    throw std::invalid_argument("unknown operator kind");
}

std::string OperatorSpec::name() const {
    switch (kind) {
        case OperatorKind::max: return "max";
        case OperatorKind::mean: return "mean";
        case OperatorKind::boltzmann: return "boltzmann(" + std::to_string(omega) + ")";
        case OperatorKind::mellowmax: return "mellowmax(" + std::to_string(omega) + ")";
        case OperatorKind::sm2:
            return "sm2(" + std::to_string(alpha) + "," + std::to_string(omega) + ")";
    }
    return "?";
}

double log_sum_exp(std::span<const double> q, double beta) {
    require_q(q);
    require_finite_param(beta, "beta");
    double m = beta * q[0];
    for (double v : q) m = std::max(m, beta * v);
    double acc = 0.0;
    for (double v : q) acc += std::exp(beta * v - m);
    return m + std::log(acc);
}

std::vector<double> softmax_weights(std::span<const double> q, double alpha) {
    require_q(q);
    require_finite_param(alpha, "alpha");
    double m = alpha * q[0];
    for (double v : q) m = std::max(m, alpha * v);
    std::vector<double> w(q.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        w[i] = std::exp(alpha * q[i] - m);
        acc += w[i];
    }
    for (double& v : w) v /= acc;
    return w;
}

double max_value(std::span<const double> q) {
    require_q(q);
    return *std::max_element(q.begin(), q.end());
}

double mean_value(std::span<const double> q) {
    require_q(q);
    double acc = 0.0;
    for (double v : q) acc += v;
    return acc / static_cast<double>(q.size());
}

double boltzmann_value(std::span<const double> q, double omega) {
    require_q(q);
    require_finite_param(omega, "omega");
    if (omega < 0.0) throw std::invalid_argument("omega must be >= 0 for boltzmann");
    double c;
    if (nearly_constant(q, &c)) return c;
    const std::vector<double> w = softmax_weights(q, omega);
    double acc = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) acc += w[i] * q[i];
    return pin_to_range(q, acc);
}

double mellowmax(std::span<const double> q, double omega) {
    require_positive_omega(omega);
    require_q(q);
    double c;
    if (nearly_constant(q, &c)) return c;
    return pin_to_range(q, (log_sum_exp(q, omega) - std::log(static_cast<double>(q.size()))) / omega);
}

double soft_mellowmax(std::span<const double> q, double alpha, double omega) {
    require_positive_omega(omega);
    require_finite_param(alpha, "alpha");
    require_q(q);
    double c;
    if (nearly_constant(q, &c)) return c;
    return pin_to_range(q, (log_sum_exp(q, alpha + omega) - log_sum_exp(q, alpha)) / omega);
}

double apply_operator(std::span<const double> q, const OperatorSpec& spec) {
    spec.validate();
    switch (spec.kind) {
        case OperatorKind::max: return max_value(q);
        case OperatorKind::mean: return mean_value(q);
        case OperatorKind::boltzmann: return boltzmann_value(q, spec.omega);
        case OperatorKind::mellowmax: return mellowmax(q, spec.omega);
        case OperatorKind::sm2: return soft_mellowmax(q, spec.alpha, spec.omega);
    }
    throw std::invalid_argument("unknown operator kind");
}

}  // namespace smx
