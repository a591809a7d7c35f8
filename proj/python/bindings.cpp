#include "sigmalab/blowup_diag.hpp"
#include "sigmalab/config.hpp"
#include "sigmalab/errors.hpp"
#include "sigmalab/fraclap.hpp"
#include "sigmalab/kernels.hpp"
#include "sigmalab/moduli.hpp"
#include "sigmalab/solver.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>

namespace py = pybind11;
using namespace sigmalab;

namespace {

EquationParams make_params(double sigma, double delta, int n) { return EquationParams(sigma, delta, n); }

py::dict lifespan_dict(const LifespanPrediction& p) {
    py::dict d;
    d["status"] = std::string(lifespan_status_name(p.status));
    d["T_lower"] = p.T_lower;
    d["T_upper"] = p.T_upper;
    d["logT_lower"] = p.logT_lower;
    d["logT_upper"] = p.logT_upper;
    d["formula"] = p.formula_id;
    return d;
}

} // namespace

PYBIND11_MODULE(_sigmalab, m) {
    m.doc() = "Damped fractional wave equations with critical nonlinearity: numerical kernels";

    static py::exception<Error> exc(m, "SigmalabError", PyExc_RuntimeError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::set_error(exc, e.what());
        }
    });

    m.def(
        "critical_exponent",
        [](double sigma, double delta, int n) { return make_params(sigma, delta, n).critical_exponent().as_double(); },
        py::arg("sigma"), py::arg("delta"), py::arg("n"));
    m.def(
        "kappa", [](double sigma, double delta, int n) { return make_params(sigma, delta, n).kappa(); },
        py::arg("sigma"), py::arg("delta"), py::arg("n"));
    m.def(
        "classify",
        [](const std::string& spec) { return std::string(dini_name(dini_classify(parse_modulus(spec)).verdict)); },
        py::arg("modulus"), "Dini / NonDini / Indeterminate for a modulus spec such as 'logpow:gamma=0.5'");
    m.def(
        "predict_lifespan",
        [](double sigma, double delta, int n, const std::string& spec, double eps) {
            return lifespan_dict(predict_lifespan(make_params(sigma, delta, n), parse_modulus(spec), eps));
        },
        py::arg("sigma"), py::arg("delta"), py::arg("n"), py::arg("modulus"), py::arg("epsilon"));
    m.def("c2s_constant", &c2s_constant, py::arg("s"), py::arg("n"));
    m.def(
        "fraclap_gaussian",
        [](double s, double x) {
            return py::make_tuple(singular_fraclap(gaussian_function(1), s, x),
                                  gaussian_fraclap_fourier(s, 1, std::abs(x)));
        },
        py::arg("s"), py::arg("x"), "(singular integral, Fourier oracle) for e^{-x^2/2}, n = 1");
    m.def(
        "kernel_values",
        [](double sigma, double delta, int n, double t, double xi) {
            const auto k = kernel_values(t, xi, make_params(sigma, delta, n));
            py::dict d;
            d["K0"] = k.K0;
            d["K1"] = k.K1;
            d["dK0"] = k.dK0;
            d["dK1"] = k.dK1;
            return d;
        },
        py::arg("sigma"), py::arg("delta"), py::arg("n"), py::arg("t"), py::arg("xi"));
    m.def(
        "run",
        [](const std::map<std::string, std::string>& overrides) {
            ExperimentConfig cfg;
            for (const auto& [k, v] : overrides) cfg.set(k, v);
            cfg.validate();
            RunResult r;
            {
                py::gil_scoped_release release;
                r = run_to_blowup(cfg.params(), cfg.modulus(), cfg.get_double("epsilon"), cfg.profile(), cfg.solver());
            }
            py::dict d;
            d["outcome"] = std::string(outcome_name(r.sample.outcome));
            d["blowup"] = r.sample.blowup;
            d["T_measured"] = r.sample.T_measured;
            d["L"] = r.sample.L;
            d["N"] = r.sample.N;
            std::vector<double> t, linf;
            for (const auto& s : r.trajectory.samples) {
                t.push_back(s.t);
                linf.push_back(s.l_inf);
            }
            d["t"] = t;
            d["l_inf"] = linf;
            return d;
        },
        py::arg("config") = std::map<std::string, std::string>{},
        "One solver run; config keys as in the CLI (string values).");
}
