#include "smx/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace smx {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

struct RawEntry {
    std::string value;
    int line = 0;
    bool used = false;
};

using RawConfig = std::map<std::string, RawEntry>;  // "section.key" -> entry

[[noreturn]] void fail(int line, const std::string& message) {
    throw ConfigError("config line " + std::to_string(line) + ": " + message);
}

double parse_double(const std::string& qualified, const RawEntry& e) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(e.value, &pos);
        if (pos != e.value.size() || !std::isfinite(v)) throw std::invalid_argument("");
        return v;
    } catch (...) {
        fail(e.line, "value for '" + qualified + "' is not a finite number: '" + e.value + "'");
    }
}

long long parse_int(const std::string& qualified, const RawEntry& e) {
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(e.value, &pos);
        if (pos != e.value.size()) throw std::invalid_argument("");
        return v;
    } catch (...) {
        fail(e.line, "value for '" + qualified + "' is not an integer: '" + e.value + "'");
    }
}

bool parse_bool(const std::string& qualified, const RawEntry& e) {
    if (e.value == "true" || e.value == "1") return true;
    if (e.value == "false" || e.value == "0") return false;
    fail(e.line, "value for '" + qualified + "' is not a boolean: '" + e.value + "'");
}

std::vector<double> parse_list(const std::string& qualified, const RawEntry& e) {
    std::vector<double> out;
    std::stringstream ss(e.value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) fail(e.line, "empty element in list '" + qualified + "'");
        RawEntry sub{item, e.line, false};
        out.push_back(parse_double(qualified, sub));
    }
    if (out.empty()) fail(e.line, "list '" + qualified + "' is empty");
    return out;
}

class Extractor {
  public:
    explicit Extractor(RawConfig& raw) : raw_(raw) {}

    template <typename T, typename F>
    void get(const std::string& qualified, T& field, F&& parse) {
        auto it = raw_.find(qualified);
        if (it == raw_.end()) return;
        it->second.used = true;
        field = parse(qualified, it->second);
    }

    void get_double(const std::string& q, double& f) { get(q, f, parse_double); }
    void get_string(const std::string& q, std::string& f) {
        get(q, f, [](const std::string&, const RawEntry& e) { return e.value; });
    }
    void get_bool(const std::string& q, bool& f) { get(q, f, parse_bool); }
    void get_list(const std::string& q, std::vector<double>& f) { get(q, f, parse_list); }
    void get_ll(const std::string& q, long long& f) { get(q, f, parse_int); }
    void get_int(const std::string& q, int& f) {
        get(q, f, [](const std::string& qual, const RawEntry& e) {
            const long long v = parse_int(qual, e);
            if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
                fail(e.line, "value for '" + qual + "' is out of int range");
            return static_cast<int>(v);
        });
    }
    void get_u64(const std::string& q, std::uint64_t& f) {
        long long v = static_cast<long long>(f);
        get_ll(q, v);
        f = static_cast<std::uint64_t>(v);
    }

  private:
    RawConfig& raw_;
};

}  // namespace

std::string command_name(Command c) {
    switch (c) {
        case Command::plan: return "plan";
        case Command::qlearn: return "qlearn";
        case Command::overest: return "overest";
        case Command::marl_overest: return "marl-overest";
        case Command::bounds: return "bounds";
        case Command::contract: return "contract";
        case Command::sweep: return "sweep";
    }
    return "?";
}

Command parse_command(const std::string& name) {
    if (name == "plan") return Command::plan;
    if (name == "qlearn") return Command::qlearn;
    if (name == "overest") return Command::overest;
    if (name == "marl-overest") return Command::marl_overest;
    if (name == "bounds") return Command::bounds;
    if (name == "contract") return Command::contract;
    if (name == "sweep") return Command::sweep;
    throw ConfigError("unknown command '" + name +
                      "' (expected plan|qlearn|overest|marl-overest|bounds|contract|sweep)");
}

OperatorSpec ExperimentConfig::operator_spec() const {
    OperatorSpec spec;
    if (op_kind == "max")
        spec = OperatorSpec::max();
    else if (op_kind == "mean")
        spec = OperatorSpec::mean();
    else if (op_kind == "boltzmann")
        spec = OperatorSpec::boltzmann(omega);
    else if (op_kind == "mellowmax")
        spec = OperatorSpec::mellowmax(omega);
    else if (op_kind == "sm2")
        spec = OperatorSpec::sm2(alpha, omega);
    else
        throw ConfigError("unknown operator kind '" + op_kind + "'");
    spec.validate();
    return spec;
}

TargetRule ExperimentConfig::target_rule() const {
    TargetRule r;
    if (rule == "max_target")
        r = TargetRule::max_target();
    else if (rule == "double_target")
        r = TargetRule::double_target();
    else if (rule == "mellowmax_target")
        r = TargetRule::mellowmax_target(omega);
    else if (rule == "sm2_target")
        r = TargetRule::sm2_target(alpha, omega);
    else
        throw ConfigError("unknown qlearn rule '" + rule + "'");
    r.validate();
    return r;
}

void ExperimentConfig::validate() const {
    operator_spec();  // surfaces bad operator parameters with their names
    if (!mdp_file.empty() && !std::filesystem::exists(mdp_file))
        throw ConfigError("mdp file does not exist: " + mdp_file);
    if (command == Command::sweep) {
        if (sweep_alphas.empty())
            throw ConfigError("missing required key 'sweep.alphas' (non-empty grid)");
        if (sweep_omegas.empty())
            throw ConfigError("missing required key 'sweep.omegas' (non-empty grid)");
    }
    if (command == Command::qlearn) target_rule();
    if (command == Command::contract && inject_q1.size() != inject_q2.size())
        throw ConfigError("inject_q1 and inject_q2 must have equal length");
    if (!(tol > 0.0)) throw ConfigError("tol must be > 0");
}

ExperimentConfig parse_config(const std::string& text) {
    RawConfig raw;
    std::string section;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']' || t.size() < 3) fail(line_no, "malformed section header");
            section = trim(t.substr(1, t.size() - 2));
            if (section.empty()) fail(line_no, "empty section name");
            continue;
        }
        const std::size_t eq = t.find('=');
        if (eq == std::string::npos) fail(line_no, "expected 'key = value'");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty()) fail(line_no, "empty key");
        if (section.empty()) fail(line_no, "key '" + key + "' appears before any [section]");
        const std::string qualified = section + "." + key;
        if (raw.count(qualified)) fail(line_no, "duplicate key '" + qualified + "'");
        raw[qualified] = {value, line_no, false};
    }

    ExperimentConfig cfg;
    Extractor ex(raw);

    std::string command_str;
    ex.get_string("run.command", command_str);
    if (!command_str.empty()) {
        cfg.command = parse_command(command_str);
        cfg.command_set = true;
    }

    ex.get_string("operator.kind", cfg.op_kind);
    ex.get_double("operator.alpha", cfg.alpha);
    ex.get_double("operator.omega", cfg.omega);

    ex.get_string("mdp.file", cfg.mdp_file);
    ex.get_string("mdp.generator", cfg.generator);
    ex.get_int("mdp.n_states", cfg.n_states);
    ex.get_int("mdp.n_actions", cfg.n_actions);
    ex.get_int("mdp.branching", cfg.branching);
    ex.get_u64("mdp.seed", cfg.mdp_seed);
    ex.get_double("mdp.gamma", cfg.gamma);
    ex.get_double("mdp.r_max", cfg.r_max);
    ex.get_int("mdp.chain_length", cfg.chain_length);
    ex.get_double("mdp.slip", cfg.slip);

    ex.get_ll("mc.samples", cfg.samples);
    ex.get_u64("mc.seed", cfg.seed);
    ex.get_double("mc.epsilon", cfg.epsilon);
    ex.get_int("mc.n", cfg.n);
    ex.get_int("mc.n_agents", cfg.n_agents);
    ex.get_list("mc.weights", cfg.weights);
    ex.get_double("mc.c", cfg.c);
    ex.get_int("mc.scan_n", cfg.scan_n);
    ex.get_list("mc.inject_q1", cfg.inject_q1);
    ex.get_list("mc.inject_q2", cfg.inject_q2);

    ex.get_string("qlearn.rule", cfg.rule);
    ex.get_ll("qlearn.steps", cfg.steps);
    ex.get_double("qlearn.lr", cfg.lr);
    ex.get_double("qlearn.eps_start", cfg.eps_start);
    ex.get_double("qlearn.eps_end", cfg.eps_end);
    ex.get_ll("qlearn.eps_decay_steps", cfg.eps_decay_steps);
    ex.get_ll("qlearn.sync_period", cfg.sync_period);
    ex.get_ll("qlearn.bias_period", cfg.bias_period);

    ex.get_list("sweep.alphas", cfg.sweep_alphas);
    ex.get_list("sweep.omegas", cfg.sweep_omegas);
    ex.get_bool("sweep.solve", cfg.sweep_solve);

    ex.get_double("numerics.tol", cfg.tol);
    ex.get_int("numerics.max_iters", cfg.max_iters);

    ex.get_string("output.csv", cfg.out_csv);
    ex.get_string("output.svg", cfg.out_svg);

    for (const auto& [qualified, entry] : raw) {
        if (!entry.used)
            fail(entry.line, "unknown key '" + qualified + "'");
    }

    if (cfg.command_set) cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

}  // namespace smx
