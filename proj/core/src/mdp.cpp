#include "smx/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "smx/rng.hpp"

namespace smx {

namespace {

constexpr double kRowSumTol = 1e-9;
constexpr double kProbFloor = 1e-15;

std::size_t sa_index(const TabularMdp& m, int s, int a) {
    return static_cast<std::size_t>(s) * static_cast<std::size_t>(m.n_actions) +
           static_cast<std::size_t>(a);
}

void check_violation(std::vector<Violation>& out, bool ok, std::string field, int s, int a,
                     std::string message) {
    if (!ok) out.push_back({std::move(field), s, a, std::move(message)});
}

}  // namespace

std::string Violation::to_string() const {
    std::ostringstream os;
    os << field;
    if (state >= 0) {
        os << "[s=" << state;
        if (action >= 0) os << ",a=" << action;
        os << "]";
    }
    os << ": " << message;
    return os.str();
}

std::vector<Violation> validate(const TabularMdp& m) {
    std::vector<Violation> out;
    check_violation(out, m.n_states >= 1, "n_states", -1, -1, "must be >= 1");
    check_violation(out, m.n_actions >= 1, "n_actions", -1, -1, "must be >= 1");
    check_violation(out, std::isfinite(m.gamma) && m.gamma >= 0.0 && m.gamma < 1.0, "gamma", -1, -1,
                    "must lie in [0, 1)");
    check_violation(out, std::isfinite(m.r_max) && m.r_max > 0.0, "r_max", -1, -1, "must be > 0");
    if (m.n_states < 1 || m.n_actions < 1) return out;

    const auto S = static_cast<std::size_t>(m.n_states);
    const auto A = static_cast<std::size_t>(m.n_actions);
    check_violation(out, m.reward.size() == S * A, "reward", -1, -1, "wrong table size");
    check_violation(out, m.transition.size() == S * A * S, "transition", -1, -1,
                    "wrong table size");
    check_violation(out, m.initial_dist.size() == S, "initial_dist", -1, -1, "wrong length");
    if (m.reward.size() != S * A || m.transition.size() != S * A * S ||
        m.initial_dist.size() != S)
        return out;

    for (int s = 0; s < m.n_states; ++s) {
        for (int a = 0; a < m.n_actions; ++a) {
            const double rv = m.reward[sa_index(m, s, a)];
            check_violation(out, std::isfinite(rv), "reward", s, a, "non-finite");
            if (std::isfinite(rv) && std::isfinite(m.r_max))
                check_violation(out, std::abs(rv) <= m.r_max, "reward", s, a,
                                "|value| exceeds r_max");
            auto row = m.transition_row(s, a);
            double sum = 0.0;
            bool entries_ok = true;
            for (double p : row) {
                if (!(std::isfinite(p) && p >= 0.0 && p <= 1.0)) entries_ok = false;
                sum += p;
            }
            check_violation(out, entries_ok, "transition", s, a,
                            "probability outside [0, 1]");
            check_violation(out, std::abs(sum - 1.0) <= kRowSumTol, "transition", s, a,
                            "row does not sum to 1");
        }
    }

    double init_sum = 0.0;
    bool init_ok = true;
    for (double p : m.initial_dist) {
        if (!(std::isfinite(p) && p >= 0.0 && p <= 1.0)) init_ok = false;
        init_sum += p;
    }
    check_violation(out, init_ok, "initial_dist", -1, -1, "probability outside [0, 1]");
    check_violation(out, std::abs(init_sum - 1.0) <= kRowSumTol, "initial_dist", -1, -1,
                    "does not sum to 1");
    return out;
}

namespace {

// Clamp sub-1e-15 probabilities to zero and renormalize the row.
void clean_row(std::span<double> row) {
    double sum = 0.0;
    for (double& p : row) {
        if (p < kProbFloor) p = 0.0;
        sum += p;
    }
    for (double& p : row) p /= sum;
}

}  // namespace

TabularMdp random_mdp(int n_states, int n_actions, int branching, std::uint64_t seed, double gamma,
                      double r_max) {
    if (n_states < 1) throw std::invalid_argument("n_states must be >= 1");
    if (n_actions < 1) throw std::invalid_argument("n_actions must be >= 1");
    if (branching < 1 || branching > n_states)
        throw std::invalid_argument("branching must lie in [1, n_states]");
    if (!std::isfinite(gamma) || gamma < 0.0 || gamma >= 1.0)
        throw std::invalid_argument("gamma must lie in [0, 1)");
    if (!std::isfinite(r_max) || r_max <= 0.0) throw std::invalid_argument("r_max must be > 0");

    TabularMdp m;
    m.n_states = n_states;
    m.n_actions = n_actions;
    m.gamma = gamma;
    m.r_max = r_max;
    const auto S = static_cast<std::size_t>(n_states);
    const auto A = static_cast<std::size_t>(n_actions);
    m.reward.assign(S * A, 0.0);
    m.transition.assign(S * A * S, 0.0);
    m.initial_dist.assign(S, 1.0 / static_cast<double>(n_states));

    Rng rng(mix64(seed));
    std::vector<int> pool(S);
    std::iota(pool.begin(), pool.end(), 0);

    for (int s = 0; s < n_states; ++s) {
        for (int a = 0; a < n_actions; ++a) {
            // Partial Fisher-Yates: the first `branching` entries of pool
            // become the distinct successor set.
            for (int i = 0; i < branching; ++i) {
                const auto j = static_cast<std::size_t>(i) +
                               rng.uniform_index(static_cast<std::uint64_t>(n_states - i));
                std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
            }
            // Exponential spacings normalize to a simplex-uniform vector.
            std::span<double> row{
                m.transition.data() + sa_index(m, s, a) * S, S};
            double sum = 0.0;
            std::vector<double> mass(static_cast<std::size_t>(branching));
            for (double& v : mass) {
                double u;
                do {
                    u = rng.uniform01();
                } while (u == 0.0);  // keeps every chosen successor reachable
                v = -std::log(1.0 - u);
                sum += v;
            }
            for (int i = 0; i < branching; ++i)
                row[static_cast<std::size_t>(pool[static_cast<std::size_t>(i)])] =
                    mass[static_cast<std::size_t>(i)] / sum;
            clean_row(row);
            m.reward[sa_index(m, s, a)] = rng.uniform(-r_max, r_max);
        }
    }
    return m;
}

TabularMdp chain_mdp(int length, double slip, double gamma) {
    if (length < 2) throw std::invalid_argument("chain length must be >= 2");
    if (!std::isfinite(slip) || slip < 0.0 || slip >= 1.0)
        throw std::invalid_argument("slip must lie in [0, 1)");
    if (!std::isfinite(gamma) || gamma < 0.0 || gamma >= 1.0)
        throw std::invalid_argument("gamma must lie in [0, 1)");

    TabularMdp m;
    m.n_states = length;
    m.n_actions = 2;  // 0 = left, 1 = right
    m.gamma = gamma;
    m.r_max = 1.0;
    const auto S = static_cast<std::size_t>(length);
    m.reward.assign(S * 2, 0.0);
    m.transition.assign(S * 2 * S, 0.0);
    m.initial_dist.assign(S, 1.0 / static_cast<double>(length));

    auto at = [&](int s, int a, int s2) -> double& {
        return m.transition[(static_cast<std::size_t>(s) * 2 + static_cast<std::size_t>(a)) * S +
                            static_cast<std::size_t>(s2)];
    };
    for (int s = 0; s < length; ++s) {
        const int left = std::max(0, s - 1);
        const int right = std::min(length - 1, s + 1);
        at(s, 0, left) += 1.0 - slip;
        at(s, 0, right) += slip;
        at(s, 1, right) += 1.0 - slip;
        at(s, 1, left) += slip;
    }
    m.reward[sa_index(m, length - 1, 1)] = 1.0;
    return m;
}

namespace {

std::string num17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_number_array(std::ostream& out, const std::vector<double>& xs) {
    out << '[';
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out << ',';
        out << num17(xs[i]);
    }
    out << ']';
}

}  // namespace

void save_mdp(const TabularMdp& m, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    // 17 significant digits: doubles round-trip bit-exactly through the file.
    out << "{\n";
    out << "  \"n_states\": " << m.n_states << ",\n";
    out << "  \"n_actions\": " << m.n_actions << ",\n";
    out << "  \"gamma\": " << num17(m.gamma) << ",\n";
    out << "  \"r_max\": " << num17(m.r_max) << ",\n";
    out << "  \"reward\": ";
    write_number_array(out, m.reward);
    out << ",\n  \"transition\": ";
    write_number_array(out, m.transition);
    out << ",\n  \"initial_dist\": ";
    write_number_array(out, m.initial_dist);
    out << "\n}\n";
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

TabularMdp load_mdp(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("malformed MDP file " + path.string() + ": " + e.what());
    }
    TabularMdp m;
    try {
        m.n_states = doc.at("n_states").get<int>();
        m.n_actions = doc.at("n_actions").get<int>();
        m.gamma = doc.at("gamma").get<double>();
        m.r_max = doc.at("r_max").get<double>();
        m.reward = doc.at("reward").get<std::vector<double>>();
        m.transition = doc.at("transition").get<std::vector<double>>();
        m.initial_dist = doc.at("initial_dist").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("malformed MDP file " + path.string() + ": " + e.what());
    }
    const std::vector<Violation> violations = validate(m);
    if (!violations.empty()) {
        std::ostringstream os;
        os << "invalid MDP file " << path.string() << ":";
        for (const Violation& v : violations) os << "\n  " << v.to_string();
        throw std::runtime_error(os.str());
    }
    return m;
}

}  // namespace smx
