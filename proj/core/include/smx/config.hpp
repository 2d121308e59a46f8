#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "smx/operators.hpp"
#include "smx/solve.hpp"

namespace smx {

// Usage-level failure: malformed config text, unknown keys, bad values.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

enum class Command { plan, qlearn, overest, marl_overest, bounds, contract, sweep };

std::string command_name(Command c);
Command parse_command(const std::string& name);

// Full experiment description. Flat `key = value` text under [section]
// headers; every CLI flag overrides the corresponding field. Defaults are
// the member initializers below.
struct ExperimentConfig {
    Command command = Command::bounds;
    bool command_set = false;

    // [operator]
    std::string op_kind = "sm2";  // max|mean|boltzmann|mellowmax|sm2
    double alpha = 0.0;
    double omega = 1.0;

    // [mdp] — file wins over generator when set
    std::string mdp_file;
    std::string generator = "random";  // random|chain
    int n_states = 20;
    int n_actions = 5;
    int branching = 3;
    std::uint64_t mdp_seed = 0;
    double gamma = 0.9;
    double r_max = 1.0;
    int chain_length = 10;
    double slip = 0.1;

    // [mc]
    long long samples = 100000;
    std::uint64_t seed = 0;
    double epsilon = 1.0;
    int n = 10;  // error-model / bound action count
    int n_agents = 3;
    std::vector<double> weights;  // empty = all-ones of n_agents
    double c = 2.0;               // contraction-scan value spread
    int scan_n = 5;
    std::vector<double> inject_q1;  // optional extra scan pair
    std::vector<double> inject_q2;

    // [qlearn]
    std::string rule = "sm2_target";
    long long steps = 200000;
    double lr = 0.1;
    double eps_start = 1.0;
    double eps_end = 0.01;
    long long eps_decay_steps = 1000;
    long long sync_period = 200;
    long long bias_period = 1000;

    // [sweep]
    std::vector<double> sweep_alphas;
    std::vector<double> sweep_omegas;
    bool sweep_solve = false;  // also solve the configured MDP per grid point

    // [numerics]
    double tol = 1e-10;
    int max_iters = 1000000;

    // [output]
    std::string out_csv;
    std::string out_svg;

    OperatorSpec operator_spec() const;
    TargetRule target_rule() const;

    // Cross-field checks for the chosen command (non-empty sweep grids,
    // referenced files exist, operator parameters valid). Throws ConfigError.
    void validate() const;
};

// Parses config text. Malformed lines report their line number; unknown
// keys are rejected by name. Does not run cross-field validation unless
// the text sets a command.
ExperimentConfig parse_config(const std::string& text);

ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace smx
