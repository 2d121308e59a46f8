#pragma once

#include <span>
#include <string>
#include <vector>

namespace smx {

// Backup operators over a single state's action-value row.
enum class OperatorKind { max, mean, boltzmann, mellowmax, sm2 };

// Tagged choice of backup operator. omega is the temperature of the outer
// log-sum-exp (boltzmann/mellowmax/sm2); alpha weights the inner softmax
// (sm2 only). alpha may be any finite real at evaluation time; the bound
// computations in theory.hpp restrict themselves to alpha >= 0.
struct OperatorSpec {
    OperatorKind kind = OperatorKind::max;
    double omega = 0.0;
    double alpha = 0.0;

    static OperatorSpec max() { return {OperatorKind::max, 0.0, 0.0}; }
    static OperatorSpec mean() { return {OperatorKind::mean, 0.0, 0.0}; }
    static OperatorSpec boltzmann(double omega) { return {OperatorKind::boltzmann, omega, 0.0}; }
    static OperatorSpec mellowmax(double omega) { return {OperatorKind::mellowmax, omega, 0.0}; }
    static OperatorSpec sm2(double alpha, double omega) { return {OperatorKind::sm2, omega, alpha}; }

    // Throws std::invalid_argument on a parameter outside its domain
    // (omega <= 0 for mellowmax/sm2, omega < 0 for boltzmann, non-finite).
    void validate() const;

    std::string name() const;
};

// log sum_i exp(beta * q[i]), computed in the beta*q domain with
// max-subtraction so it is finite for any finite inputs (beta may be
// negative or zero).
double log_sum_exp(std::span<const double> q, double beta);

// exp(alpha*q[i]) / sum_j exp(alpha*q[j]); entries nonnegative, sum 1.
std::vector<double> softmax_weights(std::span<const double> q, double alpha);

double max_value(std::span<const double> q);
double mean_value(std::span<const double> q);

// sum_i softmax_weights(q, omega)[i] * q[i]; omega = 0 gives the mean.
double boltzmann_value(std::span<const double> q, double omega);

// (1/omega) * (log_sum_exp(q, omega) - log n); between mean and max.
double mellowmax(std::span<const double> q, double omega);

// Softmax-weighted mellowmax, evaluated as the log-sum-exp difference
//   (1/omega) * (log_sum_exp(q, alpha+omega) - log_sum_exp(q, alpha)),
// which never forms exp(omega*q) directly and so cannot overflow for
// finite inputs. Strictly below max(q) unless all entries are equal.
double soft_mellowmax(std::span<const double> q, double alpha, double omega);

// Dispatch over the five operator kinds.
double apply_operator(std::span<const double> q, const OperatorSpec& spec);

}  // namespace smx
