// sigmalab command-line front end.
#include "sigmalab/blowup_diag.hpp"
#include "sigmalab/config.hpp"
#include "sigmalab/errors.hpp"
#include "sigmalab/fraclap.hpp"
#include "sigmalab/kernels.hpp"
#include "sigmalab/moduli.hpp"
#include "sigmalab/numerics.hpp"
#include "sigmalab/solver.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

using namespace sigmalab;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitStrict = 4;

std::string num(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json jnum(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

class Output {
public:
    explicit Output(const std::string& path) {
        if (path != "-") {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) throw Error(ErrorCode::ConfigInvalid, "cannot write output '" + path + "'");
        }
    }
    std::ostream& os() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

void csv_header(std::ostream& os, const ExperimentConfig& cfg, const std::string& cmd) {
    os << "# schema=1\n# command=" << cmd << "\n" << cfg.comment_header();
}

json config_json(const ExperimentConfig& cfg) {
    json j = json::object();
    for (const auto& [k, v] : cfg.values()) j[k] = v;
    return j;
}

int workers_from_env() {
    const char* w = std::getenv("SIGMALAB_WORKERS");
    if (!w || !*w) return 0;
    char* end = nullptr;
    const long v = std::strtol(w, &end, 10);
    if (*end != '\0' || v < 0) throw Error(ErrorCode::ConfigInvalid, "SIGMALAB_WORKERS must be a non-negative integer");
    return static_cast<int>(v);
}

// ---- subcommands -----------------------------------------------------------------------

int cmd_classify(const ExperimentConfig& cfg, bool strict) {
    const auto m = cfg.modulus();
    const auto p = cfg.params();
    Output out(cfg.get("output"));
    auto& os = out.os();
    const auto d = dini_classify(m);
    os << "modulus " << m.describe() << "\n";
    os << "dini " << dini_name(d.verdict) << " confidence=" << confidence_name(d.confidence) << "\n";
    bool ok = true;
    if (m.kind() != ModulusKind::Zero) {
        const auto a1 = check_A1(m);
        os << "A1 sup=" << num(a1.sup) << " pass=" << (a1.pass ? "true" : "false") << "\n";
        ok = ok && a1.pass;
        const auto pc = p.critical_exponent();
        if (pc.is_finite()) {
            const auto a3 = check_A3_convexity(m, pc.value());
            os << "A3 convex=" << (a3.pass ? "true" : "false") << " worst=" << num(a3.worst) << "\n";
            ok = ok && a3.pass;
        }
    }
    const auto adm = global_existence_admissible(p);
    os << "regime " << regime_name(p.regime()) << " kappa=" << num(p.kappa())
       << " p_c=" << num(p.critical_exponent().as_double()) << "\n";
    os << "admissible " << (adm.admissible ? "true" : "false") << " reason=" << reason_name(adm.reason) << "\n";
    return strict && !ok ? kExitStrict : kExitOk;
}

int cmd_lifespan(const ExperimentConfig& cfg, bool strict) {
    const auto p = cfg.params();
    const auto m = cfg.modulus();
    auto eps = cfg.get_list("eps_list");
    Output out(cfg.get("output"));
    auto& os = out.os();
    csv_header(os, cfg, "lifespan");
    os << "epsilon,status,T_lower,T_upper,logT_lower,logT_upper,logT_simplified,formula\n";
    bool monotone = true;
    double prev = -std::numeric_limits<double>::infinity();
    for (double e : eps) {  // decreasing ε, so log T must not decrease
        const auto pr = predict_lifespan(p, m, e);
        os << num(e) << "," << lifespan_status_name(pr.status) << "," << num(pr.T_lower) << "," << num(pr.T_upper)
           << "," << num(pr.logT_lower) << "," << num(pr.logT_upper) << "," << num(pr.logT_simplified) << ","
           << pr.formula_id << "\n";
        if (pr.status == LifespanStatus::Finite) {
            if (pr.logT_lower < prev) monotone = false;
            prev = pr.logT_lower;
        }
    }
    return strict && !monotone ? kExitStrict : kExitOk;
}

int cmd_fraclap(const ExperimentConfig& cfg, bool strict) {
    const double s = cfg.get_double("s");
    const int k = cfg.get_int("points");
    const auto pts = k == 1 ? std::vector<double>{0.0} : linspace(-3.0, 3.0, k);
    const auto h = gaussian_function(1);
    const auto rep = cross_validate(h, [s](double x) { return gaussian_fraclap_fourier(s, 1, std::abs(x)); }, s, pts);
    Output out(cfg.get("output"));
    auto& os = out.os();
    csv_header(os, cfg, "fraclap");
    os << "x,singular,oracle,rel_err\n";
    for (const auto& q : rep.points) os << num(q.x) << "," << num(q.singular) << "," << num(q.oracle) << "," << num(q.rel_err) << "\n";
    os << "# max_rel_err=" << num(rep.max_rel_err) << "\n";
    return strict && !(rep.max_rel_err < cfg.get_double("fraclap_tol")) ? kExitStrict : kExitOk;
}

int cmd_kernel(const ExperimentConfig& cfg, bool strict) {
    const auto p = cfg.params();
    const double xi = cfg.get_double("xi"), t = cfg.get_double("t");
    const auto r = lambda12(xi, p);
    const auto k = kernel_values(t, xi, p);
    const auto w = duhamel_weights(t, xi, p);
    const double wr = k.K0 * k.dK1 - k.K1 * k.dK0 - std::exp(-std::pow(xi, 2.0 * p.delta()) * t);
    Output out(cfg.get("output"));
    json j{{"schema", 1},
           {"xi", xi},
           {"t", t},
           {"branch", std::string(branch_name(r.branch))},
           {"lambda1", {r.lambda1.real(), r.lambda1.imag()}},
           {"lambda2", {r.lambda2.real(), r.lambda2.imag()}},
           {"K0", k.K0},
           {"K1", k.K1},
           {"dK0", k.dK0},
           {"dK1", k.dK1},
           {"W1", w.W1},
           {"V", w.V},
           {"wronskian_defect", std::abs(wr)},
           {"config", config_json(cfg)}};
    out.os() << j.dump() << "\n";
    return strict && !(std::abs(wr) < 1e-10) ? kExitStrict : kExitOk;
}

json sample_json(const NormSample& s) {
    return {{"type", "sample"}, {"t", s.t},         {"l_pc", s.l_pc},   {"l_inf", s.l_inf}, {"l_2", s.l_2},
            {"w_pc", s.w_pc},   {"w_inf", s.w_inf}, {"excess", s.excess}, {"dt", s.dt}};
}

json result_json(const LifespanSample& s) {
    json j{{"type", "result"},
           {"epsilon", s.epsilon},
           {"outcome", std::string(outcome_name(s.outcome))},
           {"blowup", s.blowup},
           {"T_measured", jnum(s.T_measured)},
           {"T_threshold", jnum(s.T_threshold)},
           {"L", s.L},
           {"N", s.N},
           {"dt_final", s.dt_final},
           {"steps", s.steps},
           {"excess_exponent", jnum(s.excess_exponent)},
           {"weighted_bounded", s.weighted_bounded}};
    if (s.prediction) {
        j["T_lower_pred"] = jnum(s.prediction->T_lower);
        j["T_upper_pred"] = jnum(s.prediction->T_upper);
    }
    if (!s.error.empty()) j["error"] = s.error;
    return j;
}

int cmd_solve(const ExperimentConfig& cfg, bool strict) {
    const auto p = cfg.params();
    const auto m = cfg.modulus();
    const double eps = cfg.get_double("epsilon");
    const auto r = run_to_blowup(p, m, eps, cfg.profile(), cfg.solver());
    Output out(cfg.get("output"));
    auto& os = out.os();
    const auto& g = r.trajectory.grid;
    os << json{{"type", "header"}, {"schema", 1}, {"epsilon", eps}, {"grid", {{"n", g.n}, {"N", g.N}, {"L", g.L}}},
               {"config", config_json(cfg)}}
              .dump()
       << "\n";
    for (const auto& s : r.trajectory.samples) os << sample_json(s).dump() << "\n";
    for (const auto& s : r.trajectory.snapshots) os << json{{"type", "snapshot"}, {"t", s.t}, {"u", s.u}}.dump() << "\n";
    os << result_json(r.sample).dump() << "\n";
    if (r.sample.outcome == RunOutcome::NumericalFailure) return kExitNumerical;
    const bool decided = r.sample.outcome == RunOutcome::BlowUp || r.sample.outcome == RunOutcome::Global;
    return strict && !decided ? kExitStrict : kExitOk;
}

int cmd_sweep(const ExperimentConfig& cfg, bool strict) {
    const auto p = cfg.params();
    const auto m = cfg.modulus();
    const auto eps = cfg.get_list("eps_list");
    const auto res = sweep_epsilon(p, m, eps, cfg.profile(), cfg.solver(), workers_from_env());
    Output out(cfg.get("output"));
    auto& os = out.os();
    csv_header(os, cfg, "sweep");
    os << "epsilon,T_measured,blowup,T_lower_pred,T_upper_pred,box_L,N,dt_final\n";
    bool ok = true;
    double prev_T = 0.0;
    for (const auto& s : res) {
        const double lo = s.prediction ? s.prediction->T_lower : std::nan("");
        const double hi = s.prediction ? s.prediction->T_upper : std::nan("");
        os << num(s.epsilon) << "," << num(s.T_measured) << "," << (s.blowup ? "true" : "false") << "," << num(lo) << ","
           << num(hi) << "," << num(s.L) << "," << s.N << "," << num(s.dt_final) << "\n";
        if (!s.error.empty()) {
            std::cerr << "sweep: epsilon=" << num(s.epsilon) << ": " << s.error << "\n";
            ok = false;
        }
        if (s.blowup && s.T_measured < prev_T) ok = false;
        if (s.blowup) prev_T = s.T_measured;
    }
    if (res.size() >= 3) {
        try {
            const auto f = fit_scaling(res, ScalingModel::PowerLaw);
            os << "# fit_powerlaw_slope=" << num(f.slope) << " r2=" << num(f.r2) << "\n";
        } catch (const Error&) {
            // fewer than three blow-ups; nothing to fit
        }
    }
    return strict && !ok ? kExitStrict : kExitOk;
}

TrajectoryRecord read_trajectory(const std::string& path, double& eps) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ConfigInvalid, "cannot read trajectory '" + path + "'");
    TrajectoryRecord tr;
    std::string line;
    bool header = false;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw Error(ErrorCode::ConfigParse, path + ":" + std::to_string(lineno) + ": " + e.what());
        }
        const auto type = j.value("type", "");
        if (type == "header") {
            if (j.value("schema", 0) != 1) throw Error(ErrorCode::ConfigParse, path + ": unsupported schema");
            const auto& g = j.at("grid");
            tr.grid = Grid(g.at("n").get<int>(), g.at("N").get<int>(), g.at("L").get<double>());
            eps = j.at("epsilon").get<double>();
            header = true;
        } else if (type == "snapshot") {
            tr.snapshots.push_back({j.at("t").get<double>(), j.at("u").get<std::vector<double>>()});
        }
    }
    if (!header) throw Error(ErrorCode::ConfigParse, path + ": missing header line");
    return tr;
}

int cmd_diag(const ExperimentConfig& cfg, const std::string& trajectory_path, bool strict) {
    const auto p = cfg.params();
    const auto m = cfg.modulus();
    double eps = cfg.get_double("epsilon");
    TrajectoryRecord tr;
    double T_end = 0.0;
    if (!trajectory_path.empty()) {
        tr = read_trajectory(trajectory_path, eps);
    } else {
        auto sc = cfg.solver();
        if (sc.snapshot_dt <= 0.0 && sc.snapshot_stride <= 0) sc.snapshot_dt = sc.dt0;
        auto r = run_to_blowup(p, m, eps, cfg.profile(), sc);
        tr = std::move(r.trajectory);
        if (r.sample.blowup) T_end = r.sample.T_measured;
    }
    if (tr.snapshots.empty()) throw Error(ErrorCode::InsufficientSnapshots, "trajectory has no snapshots");
    if (T_end == 0.0) T_end = tr.snapshots.back().t;
    double R_max = cfg.get_double("R_max");
    if (R_max <= 0.0) R_max = 0.5 * T_end;
    const auto fam = TestFunctionFamily::defaults(p);
    const auto grid = geomspace(cfg.get_double("R_min"), R_max, cfg.get_int("R_points"));
    const auto Y = compute_Y(tr, p, m, fam, grid);
    const double C_data = cfg.get("C_data").empty() ? data_constant(p, cfg.profile()) : cfg.get_double("C_data");
    const auto ck = check_differential_inequality(Y, p, m, eps, cfg.get_double("C5"), C_data,
                                                  cfg.get_double("R_window_lo"), R_max);
    Output out(cfg.get("output"));
    auto& os = out.os();
    csv_header(os, cfg, "diag y-functional");
    os << "R,y,Y,Yprime,rhs,ratio\n";
    size_t k = 0;
    for (size_t i = 0; i < Y.R.size(); ++i) {
        const bool interior = k < ck.R.size() && ck.R[k] == Y.R[i];
        os << num(Y.R[i]) << "," << num(Y.y[i]) << "," << num(Y.Y[i]) << ","
           << (interior ? num(ck.Yprime[k]) : "") << "," << (interior ? num(ck.rhs[k]) : "") << ","
           << (interior ? num(ck.ratio[k]) : "") << "\n";
        if (interior) ++k;
    }
    os << "# c_hat=" << num(ck.c_hat) << " pass=" << (ck.pass ? "true" : "false")
       << " degenerate=" << (ck.degenerate ? "true" : "false") << " R_positive=" << num(ck.R_positive)
       << " monotone=" << (Y.monotone ? "true" : "false") << " C_fit=" << num(Y.C_fit) << " C_bound=" << num(Y.C_bound)
       << " bound_holds=" << (Y.bound_holds ? "true" : "false") << "\n";
    return strict && !(ck.pass && Y.monotone && Y.bound_holds) ? kExitStrict : kExitOk;
}

int exit_code_for(const Error& e) {
    switch (e.code()) {
    case ErrorCode::ConfigParse:
    case ErrorCode::ConfigInvalid:
    case ErrorCode::ParamsInvalid:
    case ErrorCode::ModulusInvalid:
    case ErrorCode::ModulusDomain: return kExitConfig;
    default: return kExitNumerical;
    }
}

std::string keys_help() {
    std::ostringstream os;
    os << "Config keys (key=value, one per line; '#' comments):\n";
    for (const auto& k : config_keys())
        os << "  " << k.name << " [" << (k.default_value.empty() ? "unset" : k.default_value) << "]  " << k.help << "\n";
    os << "Environment: SIGMALAB_WORKERS sets the sweep worker count (0 = all cores).\n"
       << "Exit codes: 0 ok, 2 config error, 3 numerical failure, 4 strict check failed.\n";
    return os.str();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"sigmalab: damped fractional wave experiments"};
    app.footer(keys_help());
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;
    bool strict = false;
    app.add_option("-c,--config", config_path, "flat key=value config file");
    app.add_option("-s,--set", overrides, "override, e.g. --set N=512 (repeatable)")->allow_extra_args(false);
    app.add_flag("--strict", strict, "exit 4 when the subcommand's check fails");

    std::string modulus_arg;
    auto* classify = app.add_subcommand("classify", "Dini verdict and hypothesis checks for a modulus");
    classify->add_option("modulus", modulus_arg, "modulus spec, e.g. logpow:gamma=0.5");
    auto* lifespan = app.add_subcommand("lifespan", "predicted lifespan bounds over eps_list");
    auto* fraclap = app.add_subcommand("fraclap", "singular integral vs Fourier oracle for a Gaussian");
    auto* kernel = app.add_subcommand("kernel", "roots, kernels and Duhamel weights of one mode");
    auto* solve = app.add_subcommand("solve", "one run, NDJSON trajectory");
    auto* sweep = app.add_subcommand("sweep", "lifespan sweep over eps_list, CSV");
    auto* diag = app.add_subcommand("diag", "blow-up diagnostics");
    diag->require_subcommand(1);
    std::string trajectory_path;
    auto* yfun = diag->add_subcommand("y-functional", "Y(R) and the differential inequality, CSV");
    yfun->add_option("--trajectory", trajectory_path, "NDJSON written by solve (runs one when omitted)");
    for (auto* sc : {classify, lifespan, fraclap, kernel, solve, sweep, yfun}) {
        sc->add_option("-c,--config", config_path, "flat key=value config file");
        sc->add_option("-s,--set", overrides, "override, e.g. --set N=512 (repeatable)")->allow_extra_args(false);
        sc->add_flag("--strict", strict, "exit 4 when the check fails");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    try {
        ExperimentConfig cfg = config_path.empty() ? ExperimentConfig{} : parse_config_file(config_path);
        for (const auto& o : overrides) cfg.apply_override(o);
        if (!modulus_arg.empty()) cfg.set("modulus", modulus_arg);
        cfg.validate();

        if (*classify) return cmd_classify(cfg, strict);
        if (*lifespan) return cmd_lifespan(cfg, strict);
        if (*fraclap) return cmd_fraclap(cfg, strict);
        if (*kernel) return cmd_kernel(cfg, strict);
        if (*solve) return cmd_solve(cfg, strict);
        if (*sweep) return cmd_sweep(cfg, strict);
        if (*yfun) return cmd_diag(cfg, trajectory_path, strict);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitOk;
}
