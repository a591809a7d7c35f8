#include "sigmalab/config.hpp"

#include "sigmalab/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace sigmalab {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& key, const std::string& v) {
    double x = 0.0;
    const char* end = v.data() + v.size();
    auto [ptr, ec] = std::from_chars(v.data(), end, x);
    if (ec != std::errc() || ptr != end) {
        if (v == "inf") return std::numeric_limits<double>::infinity();
        throw Error(ErrorCode::ConfigInvalid, "key '" + key + "' expects a number, got '" + v + "'");
    }
    return x;
}

} // namespace

const std::vector<ConfigKey>& config_keys() {
    static const std::vector<ConfigKey> keys = {
        {"sigma", "1", "order of the elastic operator, >= 1"},
        {"delta", "0", "order of the damping operator, in [0, sigma]"},
        {"n", "1", "space dimension (solver grids: 1 or 2)"},
        {"epsilon0", "0.5", "data-size ceiling used by the lifespan formulas"},
        {"modulus", "constant", "zero | constant | power | logpow | iterlog, or a full spec like logpow:gamma=0.5"},
        {"gamma", "", "modulus exponent (logpow, iterlog)"},
        {"a", "", "power-law exponent (power)"},
        {"k", "", "iteration depth (iterlog)"},
        {"tau0", "", "modulus domain end; empty picks the default"},
        {"epsilon", "0.1", "data amplitude for single runs"},
        {"eps_list", "0.4,0.3,0.2,0.15,0.1", "decreasing amplitudes for sweep"},
        {"N", "1024", "grid points per axis"},
        {"L", "10", "box half-length (grown by auto_box)"},
        {"dt0", "0.05", "initial and maximal time step"},
        {"dt_floor", "1e-12", "smallest admissible step"},
        {"t_max", "1000", "final time"},
        {"blowup_threshold", "1e6", "sup-norm level that counts as blow-up"},
        {"dealias", "0.6666666666666666", "fraction of modes kept in the nonlinear term"},
        {"snapshot_dt", "0", "snapshot spacing in t (0 disables)"},
        {"snapshot_stride", "0", "snapshot every k accepted steps (0 disables)"},
        {"auto_box", "true", "grow L from the predicted lifespan"},
        {"profile_width", "0.5", "width of the Gaussian velocity datum"},
        {"perturbation", "0", "relative amplitude of a seeded radial perturbation of u1"},
        {"seed", "0", "seed for the perturbation"},
        {"s", "0.5", "fractional order for fraclap"},
        {"points", "9", "evaluation points in [-3, 3] for fraclap"},
        {"fraclap_tol", "1e-3", "strict-mode tolerance for fraclap cross-validation"},
        {"xi", "1", "mode |xi| for kernel"},
        {"t", "1", "time for kernel"},
        {"R_min", "0.5", "smallest R of the diagnostic grid"},
        {"R_max", "0", "largest R (0 picks half the last snapshot time)"},
        {"R_points", "30", "geometric grid size for the diagnostic"},
        {"R_window_lo", "1", "start of the window where c-hat is taken"},
        {"C5", "1", "calibration constant multiplying Y"},
        {"C_data", "", "data constant; empty computes it from the profile"},
        {"output", "-", "output path, '-' for stdout"},
    };
    return keys;
}

ExperimentConfig::ExperimentConfig() {
    for (const auto& k : config_keys()) values_[k.name] = k.default_value;
}

void ExperimentConfig::set(const std::string& key, const std::string& value, const std::string& where) {
    auto it = values_.find(key);
    if (it == values_.end()) throw Error(ErrorCode::ConfigParse, where + ": unknown key '" + key + "'");
    it->second = value;
}

void ExperimentConfig::apply_override(std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos)
        throw Error(ErrorCode::ConfigParse, "override: expected key=value, got '" + std::string(assignment) + "'");
    set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

const std::string& ExperimentConfig::get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw Error(ErrorCode::ConfigParse, "unknown key '" + key + "'");
    return it->second;
}

double ExperimentConfig::get_double(const std::string& key) const { return to_double(key, get(key)); }

int ExperimentConfig::get_int(const std::string& key) const {
    const double v = get_double(key);
    if (!is_integer(v)) throw Error(ErrorCode::ConfigInvalid, "key '" + key + "' expects an integer");
    return static_cast<int>(std::lround(v));
}

bool ExperimentConfig::get_bool(const std::string& key) const {
    const auto& v = get(key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw Error(ErrorCode::ConfigInvalid, "key '" + key + "' expects true/false");
}

std::vector<double> ExperimentConfig::get_list(const std::string& key) const {
    std::vector<double> out;
    std::stringstream ss(get(key));
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(to_double(key, item));
    }
    return out;
}

EquationParams ExperimentConfig::params() const {
    return EquationParams(get_double("sigma"), get_double("delta"), get_int("n"), get_double("epsilon0"));
}

Modulus ExperimentConfig::modulus() const {
    std::string spec = get("modulus");
    if (spec.find(':') == std::string::npos) {
        std::string opts;
        for (const char* k : {"a", "k", "gamma", "tau0"}) {
            if (!get(k).empty()) opts += (opts.empty() ? "" : ",") + std::string(k) + "=" + get(k);
        }
        if (!opts.empty()) spec += ":" + opts;
    }
    return parse_modulus(spec);
}

SolverConfig ExperimentConfig::solver() const {
    SolverConfig c;
    c.grid = Grid(get_int("n"), get_int("N"), get_double("L"));
    c.dt0 = get_double("dt0");
    c.dt_floor = get_double("dt_floor");
    c.t_max = get_double("t_max");
    c.blowup_threshold = get_double("blowup_threshold");
    c.dealias = get_double("dealias");
    c.snapshot_dt = get_double("snapshot_dt");
    c.snapshot_stride = get_int("snapshot_stride");
    c.auto_box = get_bool("auto_box");
    return c;
}

DataProfile ExperimentConfig::profile() const {
    DataProfile prof = gaussian_velocity_profile(params(), get_double("profile_width"));
    const double amp = get_double("perturbation");
    if (amp != 0.0) {
        // a few seeded radial cosines; deterministic for a given seed
        std::mt19937_64 gen(static_cast<unsigned long long>(get_int("seed")));
        std::uniform_real_distribution<double> U(0.0, 2.0 * M_PI);
        std::vector<std::pair<double, double>> waves;
        for (int j = 1; j <= 4; ++j) waves.push_back({double(j), U(gen)});
        auto base = prof.u1;
        prof.u1 = [base, waves, amp](double r) {
            double w = 0.0;
            for (auto [k, ph] : waves) w += std::cos(k * r + ph) / 4.0;
            return base(r) * (1.0 + amp * w);
        };
        prof.name += "+perturbed";
    }
    return prof;
}

void ExperimentConfig::validate() const {
    auto bad = [](const std::string& m) { throw Error(ErrorCode::ConfigInvalid, m); };
    try {
        (void)params();
        (void)modulus();
        if (get_double("perturbation") < 0.0 || get_double("perturbation") >= 1.0) bad("perturbation must lie in [0, 1)");
        (void)profile();
        const int n = get_int("n");
        if (n != 1 && n != 2) bad("solver grids need n in {1, 2}");
        const int N = get_int("N");
        if (N < 8 || N % 2 != 0) bad("N must be an even integer >= 8");
        if (!(get_double("L") > 0.0)) bad("L must be > 0");
        solver().validate(0.0);
        if (!(get_double("epsilon") >= 0.0)) bad("epsilon must be >= 0");
        const auto eps = get_list("eps_list");
        for (size_t i = 0; i < eps.size(); ++i) {
            if (!(eps[i] > 0.0)) bad("eps_list entries must be > 0");
            if (i > 0 && !(eps[i] < eps[i - 1])) bad("eps_list must be strictly decreasing");
        }
        if (get_int("points") < 1) bad("points must be >= 1");
        if (get_int("R_points") < 10) bad("R_points must be >= 10");
        if (!(get_double("R_min") > 0.0)) bad("R_min must be > 0");
    } catch (const Error& e) {
        if (e.code() == ErrorCode::ConfigInvalid || e.code() == ErrorCode::ConfigParse) throw;
        // params/modulus/solver errors keep their message under the config code
        std::string msg = e.what();
        const auto colon = msg.find(": ");
        throw Error(ErrorCode::ConfigInvalid, colon == std::string::npos ? msg : msg.substr(colon + 2));
    }
}

std::string ExperimentConfig::comment_header() const {
    std::string out;
    for (const auto& [k, v] : values_) out += "# " + k + "=" + v + "\n";
    return out;
}

ExperimentConfig parse_config_text(std::string_view text, const std::string& source) {
    ExperimentConfig cfg;
    std::string line;
    std::stringstream ss{std::string(text)};
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        const std::string t = trim(line);
        if (t.empty()) continue;
        const std::string where = source + ":" + std::to_string(lineno);
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw Error(ErrorCode::ConfigParse, where + ": expected key = value");
        const std::string key = trim(std::string_view(t).substr(0, eq));
        if (key.empty()) throw Error(ErrorCode::ConfigParse, where + ": empty key");
        cfg.set(key, trim(std::string_view(t).substr(eq + 1)), where);
    }
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ConfigParse, "cannot read config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path);
}

} // namespace sigmalab
