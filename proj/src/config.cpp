#include "awm/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>

namespace awm {

namespace {

std::string join_issues(const std::vector<ConfigIssue>& issues) {
    std::string s = "invalid configuration:";
    for (const auto& i : issues) s += "\n  " + (i.key.empty() ? std::string("(general)") : i.key) + ": " + i.message;
    return s;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys{
        "temperature_K", "omega0_2pi_Hz", "hw0_over_kT",  "Omega_2pi_Hz",  "gamma_over_Omega",
        "gamma_per_s",   "g_m_over_Omega", "g_m_2pi_Hz",  "beta0_abs",     "beta0_phase",
        "t_final_s",     "n_steps",       "mode",         "n_traj",        "seed",
        "jitter_halfwidth", "grid_cell_halfwidth", "fast_path"};
    return keys;
}

class Reader {
public:
    explicit Reader(const RawConfig& raw) : raw_(raw) {}

    bool has(const std::string& k) const { return raw_.count(k) > 0; }

    std::optional<double> number(const std::string& k) {
        auto it = raw_.find(k);
        if (it == raw_.end()) return std::nullopt;
        const std::string& v = it->second;
        double x = 0.0;
        const auto res = std::from_chars(v.data(), v.data() + v.size(), x);
        if (res.ec != std::errc{} || res.ptr != v.data() + v.size() || !std::isfinite(x)) {
            issue(k, "'" + v + "' is not a finite number");
            return std::nullopt;
        }
        return x;
    }

    std::optional<std::uint64_t> integer(const std::string& k) {
        auto it = raw_.find(k);
        if (it == raw_.end()) return std::nullopt;
        const std::string& v = it->second;
        std::uint64_t x = 0;
        const auto res = std::from_chars(v.data(), v.data() + v.size(), x);
        if (res.ec != std::errc{} || res.ptr != v.data() + v.size()) {
            issue(k, "'" + v + "' is not a non-negative integer");
            return std::nullopt;
        }
        return x;
    }

    std::optional<double> positive(const std::string& k) {
        auto x = number(k);
        if (x && !(*x > 0.0)) {
            issue(k, "must be > 0");
            return std::nullopt;
        }
        return x;
    }

    std::optional<double> non_negative(const std::string& k) {
        auto x = number(k);
        if (x && !(*x >= 0.0)) {
            issue(k, "must be >= 0");
            return std::nullopt;
        }
        return x;
    }

    void issue(const std::string& k, const std::string& msg) { issues.push_back({k, msg}); }

    std::vector<ConfigIssue> issues;

private:
    const RawConfig& raw_;
};

}  // namespace

ConfigError::ConfigError(std::vector<ConfigIssue> issues)
    : std::invalid_argument(join_issues(issues)), issues_(std::move(issues)) {}

RawConfig parse_config_text(const std::string& text) {
    RawConfig raw;
    std::vector<ConfigIssue> issues;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            issues.push_back({"line " + std::to_string(lineno), "expected 'key = value'"});
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            issues.push_back({"line " + std::to_string(lineno), "empty key or value"});
            continue;
        }
        if (!raw.emplace(key, value).second) issues.push_back({key, "duplicate key"});
    }
    if (!issues.empty()) throw ConfigError(std::move(issues));
    return raw;
}

RawConfig load_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_config_text(ss.str());
}

ValidatedConfig validate_config(const RawConfig& raw) {
    Reader r(raw);
    for (const auto& [k, v] : raw)
        if (!known_keys().count(k)) r.issue(k, "unknown key");

    auto exclusive = [&](const char* a, const char* b) {
        if (r.has(a) && r.has(b)) r.issue(a, std::string("give either ") + a + " or " + b + ", not both");
    };
    exclusive("omega0_2pi_Hz", "hw0_over_kT");
    exclusive("gamma_over_Omega", "gamma_per_s");
    exclusive("g_m_over_Omega", "g_m_2pi_Hz");

    const auto T = r.non_negative("temperature_K");
    if (!r.has("temperature_K")) r.issue("temperature_K", "required");
    const auto Omega2pi = r.positive("Omega_2pi_Hz");
    if (!r.has("Omega_2pi_Hz")) r.issue("Omega_2pi_Hz", "required");

    ValidatedConfig out;
    PhysicalParams& p = out.physics;
    p.theta = T ? theta_from_kelvin(*T) : std::nan("");
    p.Omega = Omega2pi ? kTwoPi * *Omega2pi : std::nan("");

    if (auto w = r.positive("omega0_2pi_Hz")) {
        p.omega0 = kTwoPi * *w;
    } else if (auto x = r.positive("hw0_over_kT")) {
        p.omega0 = *x * p.theta;
        if (T && *T == 0.0) r.issue("hw0_over_kT", "needs a positive temperature");
    } else if (!r.has("omega0_2pi_Hz") && !r.has("hw0_over_kT")) {
        r.issue("omega0_2pi_Hz", "required (or hw0_over_kT)");
    }

    if (auto g = r.non_negative("gamma_over_Omega"))
        p.gamma = *g * p.Omega;
    else if (auto g2 = r.non_negative("gamma_per_s"))
        p.gamma = *g2;
    else if (!r.has("gamma_over_Omega") && !r.has("gamma_per_s"))
        r.issue("gamma_over_Omega", "required (or gamma_per_s)");

    if (auto g = r.non_negative("g_m_over_Omega"))
        p.g_m = *g * p.Omega;
    else if (auto g2 = r.non_negative("g_m_2pi_Hz"))
        p.g_m = kTwoPi * *g2;
    else if (!r.has("g_m_over_Omega") && !r.has("g_m_2pi_Hz"))
        r.issue("g_m_over_Omega", "required (or g_m_2pi_Hz)");

    const auto b = r.positive("beta0_abs");
    if (!r.has("beta0_abs")) r.issue("beta0_abs", "required");
    const double phase = r.number("beta0_phase").value_or(std::numbers::pi / 2);
    if (b) p.beta0 = std::polar(*b, phase);

    ProtocolParams& proto = out.protocol;
    if (auto m = raw.find("mode"); m != raw.end()) {
        try {
            proto.mode = parse_mode(m->second);
        } catch (const std::invalid_argument& e) {
            r.issue("mode", e.what());
        }
    }
    proto.n_traj = r.integer("n_traj").value_or(100000);
    proto.master_seed = r.integer("seed").value_or(0);
    proto.jitter_halfwidth = r.non_negative("jitter_halfwidth").value_or(0.0);
    proto.grid_cell_halfwidth = r.positive("grid_cell_halfwidth").value_or(1.0);
    if (auto f = r.integer("fast_path")) {
        if (*f > 1) r.issue("fast_path", "must be 0 or 1");
        proto.fast_path = *f == 1;
    }
    const auto t_final = r.positive("t_final_s");
    const auto n_steps = r.integer("n_steps");
    if (n_steps && *n_steps == 0) r.issue("n_steps", "must be > 0");

    if (!r.issues.empty()) throw ConfigError(std::move(r.issues));

    try {
        p.validate();
    } catch (const std::invalid_argument& e) {
        r.issue("", e.what());
        throw ConfigError(std::move(r.issues));
    }

    proto.t_final = t_final.value_or(std::numbers::pi / (2.0 * p.Omega));
    try {
        proto.n_steps = n_steps.value_or(0);
        if (proto.n_steps == 0) proto.n_steps = default_n_steps(p, proto.t_final);
        const double worst = max_orbit_emission_probability(p, proto.t_final, proto.n_steps);
        if (worst > kMaxStepJumpProbability) {
            std::ostringstream os;
            os << "step too coarse: gamma*dt*(nbar+1) reaches " << worst << " > " << kMaxStepJumpProbability
               << "; need n_steps >= "
               << static_cast<std::uint64_t>(std::ceil(static_cast<double>(proto.n_steps) * worst /
                                                       kMaxStepJumpProbability));
            r.issue("n_steps", os.str());
        }
    } catch (const DomainError& e) {
        r.issue("", e.what());
    }
    if (proto.fast_path && proto.mode == Mode::trajectory_frequency)
        r.issue("fast_path", "only available in markovian and classical_drive modes");
    if (!r.issues.empty()) throw ConfigError(std::move(r.issues));

    if (p.semiclassical_ratio() >= kSemiclassicalWarning) {
        std::ostringstream os;
        os << "semiclassical ratio (g_m/Omega)/|beta0| = " << p.semiclassical_ratio()
           << " >= " << kSemiclassicalWarning << ": the Markovian description is not expected to hold";
        out.warnings.push_back(os.str());
    }
    return out;
}

}  // namespace awm
