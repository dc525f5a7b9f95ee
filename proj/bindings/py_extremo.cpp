#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "extremo/extremogram.hpp"
#include "extremo/fit.hpp"
#include "extremo/model.hpp"
#include "extremo/pipeline.hpp"
#include "extremo/tails.hpp"

namespace py = pybind11;
using namespace extremo;

namespace {

Mat2 mat2_from(const std::vector<std::vector<double>>& rows) {
    if (rows.size() != 2 || rows[0].size() != 2 || rows[1].size() != 2)
        throw std::invalid_argument("expected a 2x2 matrix as [[a,b],[c,d]]");
    return {rows[0][0], rows[0][1], rows[1][0], rows[1][1]};
}

std::vector<std::vector<double>> mat2_to(const Mat2& m) {
    return {{m(0, 0), m(0, 1)}, {m(1, 0), m(1, 1)}};
}

BivariateGarchParams make_bivariate(const std::vector<double>& a0,
                                    const std::vector<std::vector<double>>& alpha,
                                    const std::vector<std::vector<double>>& beta) {
    if (a0.size() != 2) throw std::invalid_argument("a0 must have two entries");
    BivariateGarchParams p;
    p.a0 = {a0[0], a0[1]};
    p.alpha = mat2_from(alpha);
    p.beta = mat2_from(beta);
    p.validate();
    return p;
}

Innovation make_innovation(const std::string& family, double rho, std::optional<double> df) {
    Innovation innov;
    if (family == "gaussian") {
        innov.family = Innovation::Family::Gaussian;
    } else if (family == "student_t") {
        innov.family = Innovation::Family::StudentT;
        if (!df) throw std::invalid_argument("student_t innovations need df");
        innov.df = *df;
    } else {
        throw std::invalid_argument("family must be 'gaussian' or 'student_t'");
    }
    innov.rho = rho;
    innov.validate();
    return innov;
}

std::vector<std::vector<double>> panels_to(const std::vector<LagPanel>& panels) {
    std::vector<std::vector<double>> out;
    out.reserve(panels.size());
    for (const LagPanel& p : panels)
        out.push_back({p(0, 0), p(0, 1), p(1, 0), p(1, 1)});
    return out;
}

ExtremogramConfig make_config(double quantile, int max_lag, const std::string& set_a,
                              const std::string& set_b, double c_a, double c_b) {
    ExtremogramConfig cfg;
    cfg.m = 1.0 / (1.0 - quantile);
    cfg.max_lag = max_lag;
    cfg.set_a = {set_a == "lower" ? TailSet::Kind::LowerRay : TailSet::Kind::UpperRay, c_a};
    cfg.set_b = {set_b == "lower" ? TailSet::Kind::LowerRay : TailSet::Kind::UpperRay, c_b};
    cfg.validate();
    return cfg;
}

}  // namespace

PYBIND11_MODULE(_extremo, m) {
    m.doc() = "Bivariate GARCH(1,1) simulation, fitting and extremal-dependence diagnostics";

    py::register_exception<NoRootInRange>(m, "NoRootInRange");
    py::register_exception<McDegenerate>(m, "McDegenerate");
    py::register_exception<ZeroDenominator>(m, "ZeroDenominator");
    py::register_exception<DegenerateSeries>(m, "DegenerateSeries");

    py::class_<SimulatedPath>(m, "SimulatedPath")
        .def_property_readonly("x", [](const SimulatedPath& p) {
            return p.cols == 1 ? std::vector<std::vector<double>>{p.x[0]}
                               : std::vector<std::vector<double>>{p.x[0], p.x[1]};
        })
        .def_property_readonly("sigma", [](const SimulatedPath& p) {
            return p.cols == 1 ? std::vector<std::vector<double>>{p.sigma[0]}
                               : std::vector<std::vector<double>>{p.sigma[0], p.sigma[1]};
        })
        .def_property_readonly("w", [](const SimulatedPath& p) {
            return p.cols == 1 ? std::vector<std::vector<double>>{p.w[0]}
                               : std::vector<std::vector<double>>{p.w[0], p.w[1]};
        })
        .def_property_readonly("z", [](const SimulatedPath& p) {
            return p.cols == 1 ? std::vector<std::vector<double>>{p.z[0]}
                               : std::vector<std::vector<double>>{p.z[0], p.z[1]};
        })
        .def_readonly("seed", &SimulatedPath::seed)
        .def_readonly("burn_in", &SimulatedPath::burn_in)
        .def_readonly("stationarity_warning", &SimulatedPath::stationarity_warning)
        .def("__len__", &SimulatedPath::size);

    py::class_<TailIndexResult>(m, "TailIndexResult")
        .def_readonly("alpha", &TailIndexResult::alpha)
        .def_readonly("bracket", &TailIndexResult::bracket)
        .def_readonly("moment_curve", &TailIndexResult::moment_curve)
        .def_readonly("mc_se", &TailIndexResult::mc_se)
        .def_readonly("n_mc", &TailIndexResult::n_mc)
        .def_readonly("bias_warning", &TailIndexResult::bias_warning)
        .def_readonly("bias_drift", &TailIndexResult::bias_drift)
        .def_readonly("positivity_warning", &TailIndexResult::positivity_warning);

    m.def(
        "spectral_radius",
        [](const std::vector<double>& a0, const std::vector<std::vector<double>>& alpha,
           const std::vector<std::vector<double>>& beta) {
            const StationarityReport r = spectral_radius_check(make_bivariate(a0, alpha, beta));
            return py::make_tuple(r.spectral_radius, r.sufficient_condition_met);
        },
        py::arg("a0"), py::arg("alpha"), py::arg("beta"),
        "Dominant eigenvalue of E A_1 and whether it is below 1");

    m.def(
        "lyapunov_exponent",
        [](const std::vector<double>& a0, const std::vector<std::vector<double>>& alpha,
           const std::vector<std::vector<double>>& beta, const std::string& family, double rho,
           std::optional<double> df, int n, int replicates, std::uint64_t seed) {
            const LyapunovEstimate e =
                lyapunov_exponent(make_bivariate(a0, alpha, beta),
                                  make_innovation(family, rho, df), n, replicates, seed);
            return py::make_tuple(e.estimate, e.standard_error);
        },
        py::arg("a0"), py::arg("alpha"), py::arg("beta"), py::arg("family") = "gaussian",
        py::arg("rho") = 0.0, py::arg("df") = py::none(), py::arg("n") = 10000,
        py::arg("replicates") = 20, py::arg("seed") = 1);

    m.def(
        "simulate_univariate",
        [](double a0, double a1, double b1, std::optional<double> innov_df, int n, int burn_in,
           std::uint64_t seed) {
            return simulate_univariate({a0, a1, b1}, innov_df, n, burn_in, seed);
        },
        py::arg("a0"), py::arg("a1"), py::arg("b1"), py::arg("innov_df") = py::none(),
        py::arg("n") = 10000, py::arg("burn_in") = 1000, py::arg("seed") = 1);

    m.def(
        "simulate_bivariate",
        [](const std::vector<double>& a0, const std::vector<std::vector<double>>& alpha,
           const std::vector<std::vector<double>>& beta, const std::string& family, double rho,
           std::optional<double> df, int n, int burn_in, std::uint64_t seed) {
            return simulate_bivariate(make_bivariate(a0, alpha, beta),
                                      make_innovation(family, rho, df), n, burn_in, seed);
        },
        py::arg("a0"), py::arg("alpha"), py::arg("beta"), py::arg("family") = "gaussian",
        py::arg("rho") = 0.0, py::arg("df") = py::none(), py::arg("n") = 10000,
        py::arg("burn_in") = 1000, py::arg("seed") = 1);

    m.def(
        "check_growth_condition",
        [](const std::vector<double>& a0, const std::vector<std::vector<double>>& alpha,
           const std::vector<std::vector<double>>& beta, const std::string& family, double rho,
           std::optional<double> df, double p, long n_mc, std::uint64_t seed) {
            const GrowthConditionReport r = check_growth_condition(
                make_bivariate(a0, alpha, beta), make_innovation(family, rho, df), p, n_mc, seed);
            return py::make_tuple(r.lhs_estimate, r.satisfied);
        },
        py::arg("a0"), py::arg("alpha"), py::arg("beta"), py::arg("family") = "gaussian",
        py::arg("rho") = 0.0, py::arg("df") = py::none(), py::arg("p") = 1.0,
        py::arg("n_mc") = 100000, py::arg("seed") = 1);

    m.def(
        "tail_index_univariate",
        [](double a0, double a1, double b1, std::optional<double> innov_df, long n_mc, double tol,
           std::uint64_t seed) {
            return tail_index_univariate({a0, a1, b1}, innov_df, n_mc, tol, seed);
        },
        py::arg("a0"), py::arg("a1"), py::arg("b1"), py::arg("innov_df") = py::none(),
        py::arg("n_mc") = 1000000, py::arg("tol") = 1e-4, py::arg("seed") = 1);

    m.def(
        "lambda_function",
        [](const std::vector<double>& a0, const std::vector<std::vector<double>>& alpha,
           const std::vector<std::vector<double>>& beta, const std::string& family, double rho,
           std::optional<double> df, double s, int n_len, int replicates, std::uint64_t seed) {
            return lambda_function(make_bivariate(a0, alpha, beta),
                                   make_innovation(family, rho, df), s, n_len, replicates, seed);
        },
        py::arg("a0"), py::arg("alpha"), py::arg("beta"), py::arg("family") = "gaussian",
        py::arg("rho") = 0.0, py::arg("df") = py::none(), py::arg("s") = 1.0,
        py::arg("n_len") = 100, py::arg("replicates") = 2000, py::arg("seed") = 1);

    m.def(
        "tail_index_bivariate",
        [](const std::vector<double>& a0, const std::vector<std::vector<double>>& alpha,
           const std::vector<std::vector<double>>& beta, const std::string& family, double rho,
           std::optional<double> df, int n_len, int replicates, double tol, std::uint64_t seed) {
            return tail_index_bivariate(make_bivariate(a0, alpha, beta),
                                        make_innovation(family, rho, df), n_len, replicates, tol,
                                        seed);
        },
        py::arg("a0"), py::arg("alpha"), py::arg("beta"), py::arg("family") = "gaussian",
        py::arg("rho") = 0.0, py::arg("df") = py::none(), py::arg("n_len") = 100,
        py::arg("replicates") = 16000, py::arg("tol") = 0.01, py::arg("seed") = 1);

    m.def(
        "theoretical_extremogram_sigma",
        [](double a0, double a1, double b1, std::optional<double> innov_df, double alpha,
           int max_lag, long n_mc, std::uint64_t seed) {
            return theoretical_extremogram_sigma({a0, a1, b1}, innov_df, alpha, max_lag, n_mc, seed)
                .rho;
        },
        py::arg("a0"), py::arg("a1"), py::arg("b1"), py::arg("innov_df") = py::none(),
        py::arg("alpha") = 2.0, py::arg("max_lag") = 20, py::arg("n_mc") = 100000,
        py::arg("seed") = 1);

    m.def(
        "decay_envelope",
        [](double a0, double a1, double b1, std::optional<double> innov_df, double p, int max_lag,
           long n_mc, std::uint64_t seed) {
            return decay_envelope({a0, a1, b1}, innov_df, p, max_lag, n_mc, seed).value;
        },
        py::arg("a0"), py::arg("a1"), py::arg("b1"), py::arg("innov_df") = py::none(),
        py::arg("p") = 1.0, py::arg("max_lag") = 20, py::arg("n_mc") = 100000, py::arg("seed") = 1);

    m.def(
        "sample_extremogram",
        [](const std::vector<double>& x1, const std::vector<double>& x2, double quantile,
           int max_lag, const std::string& set_a, const std::string& set_b, double c_a,
           double c_b) {
            const ExtremogramResult r =
                sample_extremogram(x1, x2, make_config(quantile, max_lag, set_a, set_b, c_a, c_b));
            py::dict out;
            out["rho"] = panels_to(r.rho);
            out["denominators"] = r.denom;
            out["scale_a"] = r.scale_a;
            out["scale_b"] = r.scale_b;
            out["low_count_warning"] = r.low_count_warning;
            return out;
        },
        py::arg("x1"), py::arg("x2"), py::arg("quantile") = 0.98, py::arg("max_lag") = 40,
        py::arg("set_a") = "upper", py::arg("set_b") = "upper", py::arg("c_a") = 1.0,
        py::arg("c_b") = 1.0,
        "Per-lag [rho11, rho12, rho21, rho22] panels with threshold metadata");

    m.def(
        "permutation_bands",
        [](const std::vector<double>& x1, const std::vector<double>& x2, double quantile,
           int max_lag, const std::string& set_a, const std::string& set_b, int n_perm,
           double band_quantile, std::uint64_t seed) {
            const LagPanel band = permutation_bands(
                x1, x2, make_config(quantile, max_lag, set_a, set_b, 1.0, 1.0), n_perm,
                band_quantile, seed);
            return std::vector<double>{band(0, 0), band(0, 1), band(1, 0), band(1, 1)};
        },
        py::arg("x1"), py::arg("x2"), py::arg("quantile") = 0.98, py::arg("max_lag") = 40,
        py::arg("set_a") = "upper", py::arg("set_b") = "upper", py::arg("n_perm") = 100,
        py::arg("band_quantile") = 0.96, py::arg("seed") = 1,
        "One band level per panel, ordered [11, 12, 21, 22]");

    m.def("quantile_transform",
          [](const std::vector<double>& x, double target_df) {
              return quantile_transform(x, target_df);
          },
          py::arg("x"), py::arg("target_df"));

    m.def(
        "sample_ccf",
        [](const std::vector<double>& x1, const std::vector<double>& x2, int max_lag) {
            return panels_to(sample_ccf(x1, x2, max_lag));
        },
        py::arg("x1"), py::arg("x2"), py::arg("max_lag") = 40);

    m.def("exceedance_clock_profile", &exceedance_clock_profile, py::arg("columns"),
          py::arg("period") = 78, py::arg("quantile") = 0.99);

    auto uni_fit_dict = [](const UnivariateFit& f) {
        py::dict out;
        out["a0"] = f.params.a0;
        out["a1"] = f.params.a1;
        out["b1"] = f.params.b1;
        if (f.df_hat) out["df"] = *f.df_hat;
        out["loglik"] = f.loglik;
        out["converged"] = f.converged;
        out["sigma"] = f.sigma;
        out["residuals"] = f.residuals;
        return out;
    };

    m.def(
        "fit_univariate_qmle",
        [uni_fit_dict](const std::vector<double>& x, bool grid_restart) {
            return uni_fit_dict(fit_univariate_qmle(x, std::nullopt, grid_restart));
        },
        py::arg("x"), py::arg("grid_restart") = false);

    m.def(
        "fit_univariate_t_mle",
        [uni_fit_dict](const std::vector<double>& x, bool grid_restart) {
            return uni_fit_dict(fit_univariate_t_mle(x, std::nullopt, std::nullopt, grid_restart));
        },
        py::arg("x"), py::arg("grid_restart") = false);

    m.def(
        "fit_bivariate_qmle",
        [](const std::vector<double>& x1, const std::vector<double>& x2, bool grid_restart) {
            const BivariateFit f = fit_bivariate_qmle(x1, x2, std::nullopt, grid_restart);
            py::dict out;
            out["a0"] = std::vector<double>{f.params.a0[0], f.params.a0[1]};
            out["alpha"] = mat2_to(f.params.alpha);
            out["beta"] = mat2_to(f.params.beta);
            out["rho"] = f.rho_hat;
            out["loglik"] = f.loglik;
            out["converged"] = f.converged;
            out["boundary_estimate"] = f.boundary_estimate;
            out["sigma"] = std::vector<std::vector<double>>{f.sigma[0], f.sigma[1]};
            out["residuals"] = std::vector<std::vector<double>>{f.residuals[0], f.residuals[1]};
            return out;
        },
        py::arg("x1"), py::arg("x2"), py::arg("grid_restart") = false);

    m.def(
        "fit_var",
        [](const std::vector<double>& x1, const std::vector<double>& x2, int max_order,
           const std::string& criterion) {
            const VarFit f = fit_var(x1, x2, max_order,
                                     criterion == "fpe" ? VarCriterion::FPE : VarCriterion::Schwarz);
            py::dict out;
            out["order"] = f.order;
            out["intercept"] = std::vector<double>{f.intercept[0], f.intercept[1]};
            std::vector<std::vector<std::vector<double>>> coefs;
            for (const Mat2& c : f.coefficients) coefs.push_back(mat2_to(c));
            out["coefficients"] = coefs;
            out["criterion_values"] = f.criterion_values;
            out["residuals"] = std::vector<std::vector<double>>{f.residuals[0], f.residuals[1]};
            return out;
        },
        py::arg("x1"), py::arg("x2"), py::arg("max_order") = 20,
        py::arg("criterion") = "schwarz");

    m.def("qq_points",
          [](const std::vector<double>& residuals, double df) { return qq_points(residuals, df); },
          py::arg("residuals"), py::arg("df"));

    m.def(
        "run_command",
        [](const std::string& config_json, const std::string& out_dir) {
            const json manifest = run_command(json::parse(config_json), out_dir);
            return manifest.dump(2);
        },
        py::arg("config_json"), py::arg("out_dir"),
        "Executes a CLI-style command config; returns the manifest JSON text");

    m.attr("__version__") = kToolVersion;
}
