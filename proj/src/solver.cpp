#include "sigmalab/solver.hpp"

#include "sigmalab/errors.hpp"
#include "sigmalab/numerics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <mutex>
#include <thread>

namespace sigmalab {

namespace {

double require_pc(const EquationParams& p) {
    const ExtendedReal pc = p.critical_exponent();
    if (pc.is_infinite()) throw Error(ErrorCode::ParamsInvalid, "critical exponent is infinite; nothing to integrate");
    return pc.value();
}

double radius(const Grid& g, int i, int j) {
    return g.n == 1 ? std::abs(g.x(i)) : std::hypot(g.x(i), g.x(j));
}

template <class F>
void for_each_point(const Grid& g, F&& f) {
    if (g.n == 1) {
        for (int i = 0; i < g.N; ++i) f(size_t(i), radius(g, i, 0));
    } else {
        for (int i = 0; i < g.N; ++i)
            for (int j = 0; j < g.N; ++j) f(size_t(i) * g.N + j, radius(g, i, j));
    }
}

SpectralField nonlinear_term(const SpectralField& u, double pc, const Modulus& m, double dealias) {
    SpectralField gf(u.grid());
    auto& gv = gf.values_mut();
    const auto& uv = u.values();
    for (size_t i = 0; i < uv.size(); ++i) gv[i] = nonlinearity(uv[i], pc, m);
    gf.dealias(dealias);
    return gf;
}

double sup_diff(const SpectralField& a, const SpectralField& b) {
    const auto& x = a.values();
    const auto& y = b.values();
    double m = 0.0;
    for (size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x[i] - y[i]));
    return m;
}

bool all_finite(const SpectralField& f) {
    for (double v : f.values())
        if (!std::isfinite(v)) return false;
    return true;
}

} // namespace

void SolverConfig::validate(double data_max) const {
    auto bad = [](const std::string& m) { throw Error(ErrorCode::ParamsInvalid, m); };
    if (!(dt0 > 0.0)) bad("dt0 must be > 0");
    if (!(dt_floor > 0.0 && dt_floor < dt0)) bad("dt_floor must lie in (0, dt0)");
    if (!(dealias > 0.0 && dealias <= 1.0)) bad("dealias must lie in (0, 1]");
    if (!(t_max > 0.0)) bad("t_max must be > 0");
    if (!(blowup_threshold > data_max)) bad("blow-up threshold must exceed the initial data maximum");
    if (snapshot_stride < 0 || snapshot_dt < 0.0) bad("snapshot settings must be >= 0");
    if (!(growth_limit > 0.0) || !(pc_tolerance > 0.0)) bad("step controls must be > 0");
}

DataProfile gaussian_velocity_profile(const EquationParams& p, double width) {
    if (!(width > 0.0)) throw Error(ErrorCode::ParamsInvalid, "profile width must be > 0");
    const double q0 = p.q0();
    const int n = p.n();
    // ∫_{R^n} e^{-r²/w²} (1+r²)^{-q0/2} dx, radial quadrature
    auto f = [&](double r) {
        const double shell = n == 1 ? 2.0 : 2.0 * M_PI * r;
        return shell * std::exp(-r * r / (width * width)) * std::pow(1.0 + r * r, -0.5 * q0);
    };
    const auto rs = linspace(0.0, 12.0 * width, 4001);
    double I = 0.0;
    for (size_t i = 0; i + 1 < rs.size(); ++i) I += 0.5 * (rs[i + 1] - rs[i]) * (f(rs[i]) + f(rs[i + 1]));
    const double nrm = 1.0 / I;
    DataProfile prof;
    prof.u0 = [](double) { return 0.0; };
    prof.u1 = [nrm, width](double r) { return nrm * std::exp(-r * r / (width * width)); };
    prof.radius = 4.0 * width;
    prof.name = "gaussian_u1(w=" + std::to_string(width) + ")";
    return prof;
}

SolverState initial_state(const Grid& g, const DataProfile& prof, double epsilon) {
    SolverState s{SpectralField(g), SpectralField(g), 0.0};
    auto& u = s.u.values_mut();
    auto& v = s.v.values_mut();
    for_each_point(g, [&](size_t k, double r) {
        u[k] = epsilon * prof.u0(r);
        v[k] = epsilon * prof.u1(r);
    });
    return s;
}

double nonlinearity(double u, double p_c, const Modulus& m) {
    const double tau = std::abs(u);
    if (tau == 0.0) return 0.0;
    switch (m.kind()) {
    case ModulusKind::Zero: return 0.0;
    case ModulusKind::ConstantOne: return std::pow(tau, p_c);
    case ModulusKind::PowerLaw: return std::pow(tau, p_c + m.a());
    default: return std::pow(tau, p_c) * m.mu(tau);
    }
}

double effective_power(const EquationParams& p, const Modulus& m) {
    const double pc = require_pc(p);
    return m.kind() == ModulusKind::PowerLaw ? pc + m.a() : pc;
}

StepOutput step(const SolverState& s, const PropagatorTable& table, const Modulus& m, double dealias) {
    if (!(s.u.grid() == table.grid()) || !(s.v.grid() == table.grid()))
        throw Error(ErrorCode::GridMismatch, "state and propagator grids differ");
    const double pc = require_pc(table.params());
    const double h = table.dt();
    const auto& modes = table.modes();
    const auto& cu = s.u.coeffs();
    const auto& cv = s.v.coeffs();

    const SpectralField g0 = nonlinear_term(s.u, pc, m, dealias);
    const auto& cg0 = g0.coeffs();

    SolverState pred{SpectralField(s.u.grid()), SpectralField(s.u.grid()), s.t + h};
    {
        auto& pu = pred.u.coeffs_mut();
        auto& pv = pred.v.coeffs_mut();
        for (size_t k = 0; k < modes.size(); ++k) {
            const auto& r = modes[k];
            pu[k] = r.k.K0 * cu[k] + r.k.K1 * cv[k] + r.w.W1 * cg0[k];
            pv[k] = r.k.dK0 * cu[k] + r.k.dK1 * cv[k] + r.k.K1 * cg0[k];
        }
    }

    const SpectralField g1 = nonlinear_term(pred.u, pc, m, dealias);
    const auto& cg1 = g1.coeffs();
    StepOutput out{SolverState{SpectralField(s.u.grid()), SpectralField(s.u.grid()), s.t + h}, 0.0};
    auto& ou = out.state.u.coeffs_mut();
    auto& ov = out.state.v.coeffs_mut();
    for (size_t k = 0; k < modes.size(); ++k) {
        const auto& r = modes[k];
        const double a1 = r.w.V / h;    // weight of g(u*) in u
        const double b1 = r.w.W1 / h;   // weight of g(u*) in u_t
        ou[k] = r.k.K0 * cu[k] + r.k.K1 * cv[k] + (r.w.W1 - a1) * cg0[k] + a1 * cg1[k];
        ov[k] = r.k.dK0 * cu[k] + r.k.dK1 * cv[k] + (r.k.K1 - b1) * cg0[k] + b1 * cg1[k];
    }
    const double sup = out.state.u.sup_norm();
    out.discrepancy = sup > 0.0 ? sup_diff(out.state.u, pred.u) / sup : 0.0;
    return out;
}

StepOutput step(const SolverState& s, double dt, const EquationParams& p, const Modulus& m, double dealias) {
    return step(s, PropagatorTable(p, s.u.grid(), dt), m, dealias);
}

SolverState evolve_fixed(const SolverState& s, double dt, double t_end, const EquationParams& p, const Modulus& m,
                         double dealias) {
    if (!(dt > 0.0)) throw Error(ErrorCode::ParamsInvalid, "dt must be > 0");
    const PropagatorTable table(p, s.u.grid(), dt);
    SolverState cur = s;
    while (cur.t < t_end - 1e-12 * dt) {
        const double h = std::min(dt, t_end - cur.t);
        if (h < dt * (1.0 - 1e-12)) cur = step(cur, PropagatorTable(p, cur.u.grid(), h), m, dealias).state;
        else cur = step(cur, table, m, dealias).state;
        if (!all_finite(cur.u)) throw Error(ErrorCode::NumericalFailure, "non-finite values in fixed-step run");
    }
    return cur;
}

std::string_view outcome_name(RunOutcome o) {
    switch (o) {
    case RunOutcome::BlowUp: return "BlowUp";
    case RunOutcome::Global: return "Global";
    case RunOutcome::InconclusiveGrowing: return "InconclusiveGrowing";
    case RunOutcome::InconclusiveFloor: return "InconclusiveFloor";
    case RunOutcome::NumericalFailure: return "NumericalFailure";
    }
    return "?";
}

double chosen_box(const EquationParams& p, const Modulus& m, double epsilon, const DataProfile& prof,
                  const SolverConfig& cfg) {
    if (!cfg.auto_box) return cfg.grid.L;
    double T_hat = cfg.t_max;
    if (epsilon > 0.0 && m.kind() != ModulusKind::Zero) {
        try {
            const auto pred = predict_lifespan(p, m, epsilon);
            if (pred.status == LifespanStatus::Finite && std::isfinite(pred.T_upper)) T_hat = std::min(T_hat, pred.T_upper);
        } catch (const Error&) {
            // the prediction is advisory for sizing only
        }
    }
    return std::max(cfg.grid.L, 4.0 * std::pow(T_hat, 1.0 / p.kappa()) + prof.radius);
}

namespace {

NormSample measure(const SolverState& s, const SpectralField& u_lin, const EquationParams& p, double pc, double dt) {
    NormSample ns;
    ns.t = s.t;
    ns.dt = dt;
    ns.l_pc = s.u.lp_norm(pc);
    ns.l_inf = s.u.sup_norm();
    ns.l_2 = s.u.lp_norm(2.0);
    const double w_inf = std::pow(1.0 + s.t, p.dimension_gap() / p.kappa());
    ns.w_pc = std::pow(1.0 + s.t, 1.0 / pc) * ns.l_pc;
    ns.w_inf = w_inf * ns.l_inf;
    ns.excess = w_inf * sup_diff(s.u, u_lin);
    return ns;
}

// Extrapolated blow-up time from ||u||_∞ ≈ A (T - t)^{-β}, i.e. ||u||^{-1/β} linear in t.
double extrapolate_blowup(const std::vector<NormSample>& smp, double beta) {
    const size_t k = std::min<size_t>(10, smp.size());
    std::vector<double> t, y;
    for (size_t i = smp.size() - k; i < smp.size(); ++i) {
        t.push_back(smp[i].t);
        y.push_back(std::pow(smp[i].l_inf, -1.0 / beta));
    }
    if (k < 3) return smp.back().t;
    const LinearFit f = fit_line(t, y);
    if (!(f.slope < 0.0)) return smp.back().t;
    return std::max(smp.back().t, -f.intercept / f.slope);
}

// Decide bounded vs growing for a run that reached t_max. dD/dℓ ~ ℓ^{-γ̂} with ℓ = ln(1/||u||_∞):
// γ̂ > 1 means the nonlinear excess saturates (the Dini side), otherwise it keeps growing.
void classify_terminal(const TrajectoryRecord& rec, double t_max, LifespanSample& out) {
    const auto& s = rec.samples;
    double w_first = 0.0, w_second = 0.0, sup_mid = 0.0, max_excess = 0.0, max_w = 0.0;
    for (const auto& x : s) {
        const double w = std::max(x.w_inf, x.w_pc);
        if (x.t <= 0.5 * t_max) {
            w_first = std::max(w_first, w);
            sup_mid = x.l_inf;
        } else {
            w_second = std::max(w_second, w);
        }
        max_excess = std::max(max_excess, x.excess);
        max_w = std::max(max_w, x.w_inf);
    }
    out.weighted_bounded = std::isfinite(w_second) && w_second <= 1.5 * std::max(w_first, 1e-300);
    if (s.back().l_inf > sup_mid * 1.001 && s.back().l_inf > 0.0) {
        out.outcome = RunOutcome::InconclusiveGrowing;
        return;
    }
    if (max_excess <= 1e-13 * max_w) {
        out.outcome = out.weighted_bounded ? RunOutcome::Global : RunOutcome::InconclusiveGrowing;
        return;
    }
    // excess and ℓ on a geometric time grid over the last decade
    const auto grid = geomspace(0.1 * t_max, t_max, 12);
    std::vector<double> D, ell;
    size_t j = 0;
    for (double tg : grid) {
        while (j + 1 < s.size() && s[j + 1].t <= tg) ++j;
        if (s[j].l_inf <= 0.0) continue;
        D.push_back(s[j].excess);
        ell.push_back(std::log(1.0 / s[j].l_inf));
    }
    std::vector<double> lx, ly;
    bool decreasing_tail = true;
    for (size_t i = 0; i + 1 < D.size(); ++i) {
        const double dD = D[i + 1] - D[i];
        const double dl = ell[i + 1] - ell[i];
        if (dD > 0.0) decreasing_tail = false;
        if (dD > 0.0 && dl > 0.0) {
            lx.push_back(std::log(0.5 * (ell[i] + ell[i + 1])));
            ly.push_back(std::log(dD / dl));
        }
    }
    if (decreasing_tail) {
        out.excess_exponent = std::numeric_limits<double>::infinity();
        out.outcome = out.weighted_bounded ? RunOutcome::Global : RunOutcome::InconclusiveGrowing;
        return;
    }
    if (lx.size() < 3) {
        out.outcome = RunOutcome::InconclusiveGrowing;
        return;
    }
    out.excess_exponent = -fit_line(lx, ly).slope;
    out.outcome = (out.excess_exponent > 1.0 && out.weighted_bounded) ? RunOutcome::Global : RunOutcome::InconclusiveGrowing;
}

} // namespace

RunResult run_to_blowup(const EquationParams& p, const Modulus& m, double epsilon, const DataProfile& prof,
                        const SolverConfig& cfg) {
    const double pc = require_pc(p);
    if (!(epsilon >= 0.0)) throw Error(ErrorCode::ParamsInvalid, "epsilon must be >= 0");
    const double L = chosen_box(p, m, epsilon, prof, cfg);
    const Grid g(cfg.grid.n, cfg.grid.N, L);
    if (g.n != p.n()) throw Error(ErrorCode::GridMismatch, "grid dimension differs from n");

    RunResult res;
    res.trajectory.grid = g;
    LifespanSample& out = res.sample;
    out.epsilon = epsilon;
    out.L = L;
    out.N = g.N;
    if (epsilon > 0.0 && m.kind() != ModulusKind::Zero) {
        try {
            out.prediction = predict_lifespan(p, m, epsilon);
        } catch (const Error&) {
        }
    }

    SolverState s = initial_state(g, prof, epsilon);
    const double data_max = std::max(s.u.sup_norm(), s.v.sup_norm());
    cfg.validate(s.u.sup_norm());
    LinearState lin{s.u, s.v};
    // relative growth is measured against at least this scale so that u(0) = 0 does not stall the start
    const double sup_scale = std::max(data_max, 1e-300);
    const double beta = 2.0 / (effective_power(p, m) - 1.0);

    std::map<double, PropagatorTable> tables;
    auto table_for = [&](double h) -> const PropagatorTable& {
        auto it = tables.find(h);
        if (it == tables.end()) {
            if (tables.size() > 64) tables.clear();
            it = tables.emplace(h, PropagatorTable(p, g, h)).first;
        }
        return it->second;
    };

    auto& rec = res.trajectory;
    rec.samples.push_back(measure(s, lin.u, p, pc, cfg.dt0));
    double next_snap = cfg.snapshot_dt > 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    auto maybe_snapshot = [&](long step_no) {
        bool take = cfg.snapshot_stride > 0 && step_no % cfg.snapshot_stride == 0;
        if (s.t >= next_snap - 1e-12) {
            take = true;
            while (next_snap <= s.t + 1e-12) next_snap += cfg.snapshot_dt;
        }
        if (take) rec.snapshots.push_back({s.t, s.u.values()});
    };
    maybe_snapshot(0);

    double dt = cfg.dt0;
    out.outcome = RunOutcome::Global;
    bool done = false;
    while (!done) {
        if (s.t >= cfg.t_max - 1e-12 * cfg.dt0) break;
        if (out.steps >= cfg.max_steps) {
            out.outcome = RunOutcome::InconclusiveFloor;
            out.error = "step budget exhausted";
            done = true;
            break;
        }
        const double h = std::min(dt, cfg.t_max - s.t);
        const PropagatorTable& tab = table_for(h);
        StepOutput st = step(s, tab, m, cfg.dealias);
        const double sup_old = s.u.sup_norm();
        const double sup_new = st.state.u.sup_norm();
        const bool finite = std::isfinite(sup_new) && all_finite(st.state.v);
        const double growth = (sup_new - sup_old) / std::max(sup_old, sup_scale);
        const bool reject = !finite || (cfg.adaptive && (growth > cfg.growth_limit || st.discrepancy > cfg.pc_tolerance));
        if (reject) {
            if (!cfg.adaptive) {
                out.outcome = RunOutcome::NumericalFailure;
                out.error = "non-finite values at t = " + std::to_string(s.t);
                break;
            }
            dt *= 0.5;
            if (dt < cfg.dt_floor) {
                out.outcome = finite ? RunOutcome::InconclusiveFloor : RunOutcome::NumericalFailure;
                out.error = "dt fell below dt_floor at t = " + std::to_string(s.t);
                break;
            }
            continue;
        }
        s = std::move(st.state);
        lin = propagate_linear(lin, tab);
        ++out.steps;
        rec.samples.push_back(measure(s, lin.u, p, pc, h));
        maybe_snapshot(out.steps);
        if (sup_new >= cfg.blowup_threshold) {
            out.blowup = true;
            out.outcome = RunOutcome::BlowUp;
            out.T_threshold = s.t;
            rec.blowup_index = static_cast<int>(rec.samples.size()) - 1;
            out.T_measured = extrapolate_blowup(rec.samples, beta);
            break;
        }
        if (cfg.adaptive && growth < 0.25 * cfg.growth_limit && st.discrepancy < cfg.pc_tolerance / 16.0 && dt < cfg.dt0)
            dt = std::min(2.0 * dt, cfg.dt0);
    }
    out.dt_final = dt;
    if (!out.blowup && out.outcome == RunOutcome::Global) classify_terminal(rec, cfg.t_max, out);
    return res;
}

std::vector<LifespanSample> sweep_epsilon(const EquationParams& p, const Modulus& m, const std::vector<double>& eps_list,
                                          const DataProfile& prof, const SolverConfig& cfg, int workers) {
    for (size_t i = 0; i + 1 < eps_list.size(); ++i)
        if (!(eps_list[i] > eps_list[i + 1])) throw Error(ErrorCode::ParamsInvalid, "eps_list must be decreasing");
    std::vector<LifespanSample> out(eps_list.size());
    std::atomic<size_t> next{0};
    auto worker = [&] {
        for (size_t i = next++; i < eps_list.size(); i = next++) {
            try {
                out[i] = run_to_blowup(p, m, eps_list[i], prof, cfg).sample;
            } catch (const std::exception& e) {
                out[i].epsilon = eps_list[i];
                out[i].outcome = RunOutcome::NumericalFailure;
                out[i].error = e.what();
            }
        }
    };
    int w = workers > 0 ? workers : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    w = std::min<int>(w, static_cast<int>(eps_list.size()));
    if (w <= 1) {
        worker();
        return out;
    }
    std::vector<std::thread> pool;
    for (int i = 0; i < w; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    return out;
}

ScalingFit fit_scaling(const std::vector<LifespanSample>& samples, ScalingModel model) {
    std::vector<double> x, y;
    for (const auto& s : samples) {
        if (!(s.epsilon > 0.0) || !std::isfinite(s.T_measured) || !(s.T_measured > 0.0)) continue;
        x.push_back(model == ScalingModel::PowerLaw ? std::log(1.0 / s.epsilon) : std::pow(s.epsilon, -2.0));
        y.push_back(std::log(s.T_measured));
    }
    if (x.size() < 3) throw Error(ErrorCode::InsufficientData, "scaling fit needs >= 3 finite samples");
    const LinearFit f = fit_line(x, y);
    return {f.slope, f.intercept, f.r2, pearson(x, y), f.residuals};
}

} // namespace sigmalab
