#include "smx/overestimation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "smx/rng.hpp"
#include "smx/theory.hpp"

namespace smx {

namespace {

constexpr long long kSampleChunk = 4096;

// Neumaier-compensated accumulator for (sum, sum of squares).
struct MomentAccumulator {
    double sum = 0.0;
    double sum_comp = 0.0;
    double sumsq = 0.0;
    double sumsq_comp = 0.0;

    void add(double x) {
        add_to(sum, sum_comp, x);
        add_to(sumsq, sumsq_comp, x * x);
    }
    void merge(const MomentAccumulator& other) {
        add_to(sum, sum_comp, other.sum + other.sum_comp);
        add_to(sumsq, sumsq_comp, other.sumsq + other.sumsq_comp);
    }
    ThetaEstimate finish(long long n) const {
        ThetaEstimate est;
        est.samples = n;
        const double nd = static_cast<double>(n);
        const double s1 = sum + sum_comp;
        const double s2 = sumsq + sumsq_comp;
        est.mean = s1 / nd;
        if (n > 1) {
            const double var = std::max(0.0, (s2 - s1 * s1 / nd) / (nd - 1.0));
            est.std_error = std::sqrt(var / nd);
        }
        return est;
    }

  private:
    static void add_to(double& acc, double& comp, double x) {
        const double t = acc + x;
        if (std::abs(acc) >= std::abs(x))
            comp += (acc - t) + x;
        else
            comp += (x - t) + acc;
        acc = t;
    }
};

// Runs fn once per sample, chunked and seeded per the shared protocol;
// fn receives the chunk RNG and returns the statistic for one sample.
template <typename F>
ThetaEstimate estimate(long long samples, std::uint64_t seed, F&& fn) {
    MomentAccumulator total;
    const long long chunks = (samples + kSampleChunk - 1) / kSampleChunk;
    for (long long k = 0; k < chunks; ++k) {
        Rng rng(chunk_seed(seed, static_cast<std::uint64_t>(k)));
        const long long in_chunk = std::min(kSampleChunk, samples - k * kSampleChunk);
        MomentAccumulator part;
        for (long long t = 0; t < in_chunk; ++t) part.add(fn(rng));
        total.merge(part);
    }
    return total.finish(samples);
}

double reduction_upper_bound(const OperatorSpec& spec, int n) {
    if (spec.kind == OperatorKind::mellowmax)
        return std::log(static_cast<double>(n)) / spec.omega;
    if (spec.kind == OperatorKind::sm2) return xi_upper_bound(spec.alpha, spec.omega, n);
    throw std::invalid_argument("reduction is defined for mellowmax and sm2 only");
}

ReductionEstimate finish_reduction(const ThetaEstimate& est, double bound) {
    ReductionEstimate red;
    red.reduction_mean = est.mean;
    red.std_error = est.std_error;
    red.bound = bound;
    red.within_bound = red.reduction_mean > 0.0 &&
                       red.reduction_mean <= bound + 3.0 * red.std_error;
    return red;
}

}  // namespace

void ErrorModel::validate() const {
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    if (!std::isfinite(epsilon) || epsilon <= 0.0)
        throw std::invalid_argument("epsilon must be > 0");
    if (samples < 1) throw std::invalid_argument("samples must be >= 1");
}

double MixerSpec::min_weight() const {
    return *std::min_element(weights.begin(), weights.end());
}

double MixerSpec::max_weight() const {
    return *std::max_element(weights.begin(), weights.end());
}

void MixerSpec::validate() const {
    if (weights.empty()) throw std::invalid_argument("mixer needs >= 1 agent");
    for (double w : weights)
        if (!std::isfinite(w) || w < 0.0)
            throw std::invalid_argument("mixing weights must be >= 0");
    if (max_weight() <= 0.0) throw std::invalid_argument("mixer needs a positive weight");
}

double analytic_theta_max(int n, double epsilon) {
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    if (!std::isfinite(epsilon) || epsilon <= 0.0)
        throw std::invalid_argument("epsilon must be > 0");
    const double nd = static_cast<double>(n);
    return epsilon * (nd - 1.0) / (nd + 1.0);
}

ThetaEstimate sample_theta(const ErrorModel& model, const OperatorSpec& spec) {
    model.validate();
    spec.validate();
    std::vector<double> z(static_cast<std::size_t>(model.n));
    return estimate(model.samples, model.seed, [&](Rng& rng) {
        rng.fill_uniform(z, -model.epsilon, model.epsilon);
        return apply_operator(z, spec);
    });
}

ReductionEstimate paired_theta_reduction(const ErrorModel& model, const OperatorSpec& spec) {
    model.validate();
    spec.validate();
    const double bound = reduction_upper_bound(spec, model.n);
    if (model.n == 1) {
        // max and every soft operator coincide on a single action.
        ReductionEstimate red;
        red.bound = bound;
        red.within_bound = true;
        return red;
    }
    std::vector<double> z(static_cast<std::size_t>(model.n));
    const ThetaEstimate est = estimate(model.samples, model.seed, [&](Rng& rng) {
        rng.fill_uniform(z, -model.epsilon, model.epsilon);
        return max_value(z) - apply_operator(z, spec);
    });
    return finish_reduction(est, bound);
}

ThetaEstimate marl_sample_theta(const ErrorModel& model, const MixerSpec& mixer,
                                const OperatorSpec& spec) {
    model.validate();
    mixer.validate();
    spec.validate();
    std::vector<double> z(static_cast<std::size_t>(model.n));
    return estimate(model.samples, model.seed, [&](Rng& rng) {
        double mixed = 0.0;
        for (double w : mixer.weights) {
            rng.fill_uniform(z, -model.epsilon, model.epsilon);
            mixed += w * apply_operator(z, spec);
        }
        return mixed;
    });
}

ReductionEstimate marl_paired_reduction(const ErrorModel& model, const MixerSpec& mixer,
                                        const OperatorSpec& spec) {
    model.validate();
    mixer.validate();
    const double bound = static_cast<double>(mixer.n_agents()) * mixer.max_weight() *
                         reduction_upper_bound(spec, model.n);
    if (model.n == 1) {
        ReductionEstimate red;
        red.bound = bound;
        red.within_bound = true;
        return red;
    }
    std::vector<double> z(static_cast<std::size_t>(model.n));
    const ThetaEstimate est = estimate(model.samples, model.seed, [&](Rng& rng) {
        double mixed = 0.0;
        for (double w : mixer.weights) {
            rng.fill_uniform(z, -model.epsilon, model.epsilon);
            mixed += w * (max_value(z) - apply_operator(z, spec));
        }
        return mixed;
    });
    return finish_reduction(est, bound);
}

}  // namespace smx
