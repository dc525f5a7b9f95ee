#include "extremo/fit.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "extremo/dist.hpp"
#include "extremo/optim.hpp"
#include "extremo/rng.hpp"

namespace extremo {

namespace {

constexpr double kRadiusBarrier = 1.0 - 1e-4;
constexpr double kBig = 1e300;

double sample_variance(std::span<const double> x) {
    const double m = mean_of(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return s / static_cast<double>(x.size());
}

void require_series(std::span<const double> x, const char* who) {
    if (x.size() < 8) throw DegenerateSeries(std::string(who) + ": series too short");
    if (!(sample_variance(x) > 0.0)) throw DegenerateSeries(std::string(who) + ": constant series");
}

double safe_exp(double u) { return u > 60.0 ? std::numeric_limits<double>::infinity() : std::exp(u); }

// ----- univariate objectives ---------------------------------------------

struct UniGaussNll {
    std::span<const double> x;
    double w0;

    double operator()(std::span<const double> u) const {
        const double a0 = safe_exp(u[0]), a1 = safe_exp(u[1]), b1 = safe_exp(u[2]);
        if (!std::isfinite(a0 + a1 + b1)) return kBig;
        double w = w0, acc = 0.0;
        for (const double xt : x) {
            acc += std::log(w) + xt * xt / w;
            w = a0 + (a1 * xt * xt + b1 * w);
            if (!(w > 0.0) || !std::isfinite(w)) return kBig;
        }
        return std::isfinite(acc) ? acc : kBig;
    }
};

struct UniStudentNll {
    std::span<const double> x;
    double w0;

    double operator()(std::span<const double> u) const {
        const double a0 = safe_exp(u[0]), a1 = safe_exp(u[1]), b1 = safe_exp(u[2]);
        const double df = 2.0 + safe_exp(u[3]);
        if (!std::isfinite(a0 + a1 + b1 + df) || df > 1e6) return kBig;
        const double s = df - 2.0;
        const double lc = std::lgamma(0.5 * (df + 1.0)) - std::lgamma(0.5 * df) -
                          0.5 * std::log(s * 3.14159265358979323846);
        double w = w0, acc = 0.0;
        for (const double xt : x) {
            acc += 0.5 * std::log(w) - lc + 0.5 * (df + 1.0) * std::log1p(xt * xt / (s * w));
            w = a0 + (a1 * xt * xt + b1 * w);
            if (!(w > 0.0) || !std::isfinite(w)) return kBig;
        }
        return std::isfinite(acc) ? acc : kBig;
    }
};

// Simplex run with one deterministic perturbed restart and a final polish at
// the best point found. Reported counters cover every run.
NelderMeadResult optimize_with_restart(const std::function<double(std::span<const double>)>& f,
                                       std::vector<double> u0, const NelderMeadOptions& opts,
                                       const std::vector<std::vector<double>>& extra_starts = {}) {
    long total_evals = 0;
    int total_iters = 0;
    auto run = [&](std::span<const double> start, const NelderMeadOptions& o) {
        NelderMeadResult r = nelder_mead(f, start, o);
        total_evals += r.evaluations;
        total_iters += r.iterations;
        return r;
    };

    NelderMeadResult best = run(u0, opts);

    Rng rng(0x7ef1u);
    std::vector<double> perturbed = u0;
    for (double& v : perturbed) v += (rng.uniform01() - 0.5) * 0.6;
    if (NelderMeadResult alt = run(perturbed, opts); alt.f < best.f) best = std::move(alt);

    NelderMeadOptions probe = opts;
    probe.max_iter = std::max(400, opts.max_iter / 8);
    for (const auto& start : extra_starts) {
        const NelderMeadResult r = run(start, probe);
        if (r.f < best.f)
            if (NelderMeadResult full = run(r.x, opts); full.f < best.f) best = std::move(full);
    }

    if (NelderMeadResult polish = run(best.x, opts); polish.f <= best.f) best = std::move(polish);
    best.evaluations = total_evals;
    best.iterations = total_iters;
    return best;
}

std::vector<std::vector<double>> uni_grid_starts(double var, bool with_df) {
    std::vector<std::vector<double>> starts;
    for (double a1 = 0.1; a1 <= 0.31; a1 += 0.1)
        for (double b1 = 0.1; b1 + a1 < 0.96; b1 += 0.1) {
            std::vector<double> u{std::log(var * (1.0 - a1 - b1)), std::log(a1), std::log(b1)};
            if (with_df) u.push_back(std::log(6.0));
            starts.push_back(std::move(u));
        }
    return starts;
}

void attach_residuals(std::span<const double> x, std::vector<double> sigma, UnivariateFit& fit) {
    fit.sigma = std::move(sigma);
    fit.residuals.resize(x.size());
    for (size_t t = 0; t < x.size(); ++t) {
        if (!exact_reconstruction_pair(x[t], fit.sigma[t], fit.residuals[t],
                                       &fit.reconstruction_repairs))
            ++fit.reconstruction_failures;
    }
}

UnivariateFit run_univariate(std::span<const double> x, std::optional<UnivariateGarchParams> init,
                             std::optional<double> df_init, bool student, bool grid_restart) {
    require_series(x, student ? "fit_univariate_t_mle" : "fit_univariate_qmle");
    const double var = sample_variance(x);

    UnivariateGarchParams p0 = init.value_or(
        UnivariateGarchParams{std::max(var * 0.1, 1e-300), 0.1, 0.8});
    p0.validate();
    const double df0 = df_init.value_or(8.0);
    if (!(df0 > 2.0)) throw std::invalid_argument("fit_univariate_t_mle: df_init must be > 2");

    std::vector<double> u0{std::log(p0.a0), std::log(std::max(p0.a1, 1e-8)),
                           std::log(std::max(p0.b1, 1e-8))};
    if (student) u0.push_back(std::log(df0 - 2.0));

    NelderMeadOptions opts;
    opts.max_iter = 3000;
    opts.step = 0.3;

    std::function<double(std::span<const double>)> obj;
    UniGaussNll gauss{x, var};
    UniStudentNll stud{x, var};
    if (student)
        obj = [&stud](std::span<const double> u) { return stud(u); };
    else
        obj = [&gauss](std::span<const double> u) { return gauss(u); };

    const double f_init = obj(u0);
    const NelderMeadResult opt = optimize_with_restart(
        obj, u0, opts, grid_restart ? uni_grid_starts(var, student) : std::vector<std::vector<double>>{});

    UnivariateFit fit;
    fit.init = p0;
    fit.params = {std::exp(opt.x[0]), std::exp(opt.x[1]), std::exp(opt.x[2])};
    if (student) fit.df_hat = 2.0 + std::exp(opt.x[3]);
    // The Gaussian objective is -2 * quasi-loglik; the Student objective is
    // the exact negative log-likelihood.
    const double scale = student ? -1.0 : -0.5;
    fit.loglik = scale * opt.f;
    fit.loglik_init = scale * f_init;
    fit.converged = opt.converged;
    fit.iterations = opt.iterations;
    fit.evaluations = opt.evaluations;
    fit.low_sample_warning = x.size() < 500;
    attach_residuals(x, volatility_filter(x, fit.params, var), fit);
    return fit;
}

// ----- bivariate objective -------------------------------------------------

struct BivGaussNll {
    std::span<const double> x1, x2;
    double w01, w02;

    static BivariateGarchParams decode(std::span<const double> u, double& rho) {
        BivariateGarchParams p;
        p.a0 = {safe_exp(u[0]), safe_exp(u[1])};
        p.alpha = {safe_exp(u[2]), safe_exp(u[3]), safe_exp(u[4]), safe_exp(u[5])};
        p.beta = {safe_exp(u[6]), safe_exp(u[7]), safe_exp(u[8]), safe_exp(u[9])};
        rho = std::tanh(u[10]);
        return p;
    }

    double operator()(std::span<const double> u) const {
        double rho;
        const BivariateGarchParams p = decode(u, rho);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                if (!std::isfinite(p.alpha(i, j)) || !std::isfinite(p.beta(i, j))) return kBig;
        if (!std::isfinite(p.a0[0]) || !std::isfinite(p.a0[1])) return kBig;
        if (mean_transition(p).perron_root() >= kRadiusBarrier) return kBig;

        const double one_m_r2 = 1.0 - rho * rho;
        const double log_c = std::log(one_m_r2);
        double w1 = w01, w2 = w02, acc = 0.0;
        const size_t n = x1.size();
        for (size_t t = 0; t < n; ++t) {
            const double q1 = x1[t] * x1[t] / w1;
            const double q2 = x2[t] * x2[t] / w2;
            const double cross = x1[t] * x2[t] / std::sqrt(w1 * w2);
            acc += std::log(w1 * w2) + log_c + (q1 - 2.0 * rho * cross + q2) / one_m_r2;
            const double w1n = p.a0[0] + p.alpha(0, 0) * x1[t] * x1[t] +
                               p.alpha(0, 1) * x2[t] * x2[t] + p.beta(0, 0) * w1 +
                               p.beta(0, 1) * w2;
            const double w2n = p.a0[1] + p.alpha(1, 0) * x1[t] * x1[t] +
                               p.alpha(1, 1) * x2[t] * x2[t] + p.beta(1, 0) * w1 +
                               p.beta(1, 1) * w2;
            w1 = w1n;
            w2 = w2n;
            if (!(w1 > 0.0) || !(w2 > 0.0) || !std::isfinite(w1 + w2)) return kBig;
        }
        return std::isfinite(acc) ? acc : kBig;
    }
};

std::vector<double> encode_bivariate(const BivariateGarchParams& p, double rho) {
    auto lg = [](double v) { return std::log(std::max(v, 1e-8)); };
    const double r = std::clamp(rho, -0.99, 0.99);
    return {std::log(p.a0[0]), std::log(p.a0[1]), lg(p.alpha(0, 0)), lg(p.alpha(0, 1)),
            lg(p.alpha(1, 0)), lg(p.alpha(1, 1)), lg(p.beta(0, 0)),  lg(p.beta(0, 1)),
            lg(p.beta(1, 0)),  lg(p.beta(1, 1)),  std::atanh(r)};
}

// Scales the coefficient matrices down until the stationarity barrier admits
// the point.
void make_feasible(BivariateGarchParams& p) {
    for (int guard = 0; guard < 400; ++guard) {
        if (mean_transition(p).perron_root() < kRadiusBarrier - 1e-4) return;
        p.alpha = p.alpha * 0.985;
        p.beta = p.beta * 0.985;
    }
}

}  // namespace

UnivariateFit fit_univariate_qmle(std::span<const double> x,
                                  std::optional<UnivariateGarchParams> init, bool grid_restart) {
    return run_univariate(x, init, std::nullopt, false, grid_restart);
}

UnivariateFit fit_univariate_t_mle(std::span<const double> x,
                                   std::optional<UnivariateGarchParams> init,
                                   std::optional<double> df_init, bool grid_restart) {
    return run_univariate(x, init, df_init, true, grid_restart);
}

BivariateFit fit_bivariate_qmle(std::span<const double> x1, std::span<const double> x2,
                                std::optional<BivariateInit> init, bool grid_restart) {
    if (x1.size() != x2.size()) throw std::invalid_argument("fit_bivariate_qmle: size mismatch");
    require_series(x1, "fit_bivariate_qmle");
    require_series(x2, "fit_bivariate_qmle");

    BivariateInit start;
    if (init) {
        start = *init;
        start.params.validate();
    } else {
        const UnivariateFit f1 = fit_univariate_qmle(x1);
        const UnivariateFit f2 = fit_univariate_qmle(x2);
        start.params.a0 = {f1.params.a0, f2.params.a0};
        start.params.alpha = {f1.params.a1, 0.01, 0.01, f2.params.a1};
        start.params.beta = {f1.params.b1, 0.01, 0.01, f2.params.b1};
        start.rho = correlation_of(f1.residuals, f2.residuals);
    }
    make_feasible(start.params);

    BivGaussNll obj{x1, x2, sample_variance(x1), sample_variance(x2)};
    auto fwrap = [&obj](std::span<const double> u) { return obj(u); };

    const std::vector<double> u0 = encode_bivariate(start.params, start.rho);
    const double f_init = obj(u0);

    std::vector<std::vector<double>> extra;
    if (grid_restart) {
        for (double a = 0.1; a <= 0.31; a += 0.1)
            for (double b = 0.4; a + b < 0.96; b += 0.1) {
                BivariateGarchParams g = start.params;
                g.alpha(0, 0) = g.alpha(1, 1) = a;
                g.beta(0, 0) = g.beta(1, 1) = b;
                make_feasible(g);
                extra.push_back(encode_bivariate(g, start.rho));
            }
    }

    NelderMeadOptions opts;
    opts.max_iter = 12000;
    opts.step = 0.25;
    const NelderMeadResult opt = optimize_with_restart(fwrap, u0, opts, extra);

    BivariateFit fit;
    fit.init_params = start.params;
    fit.rho_init = start.rho;
    fit.params = BivGaussNll::decode(opt.x, fit.rho_hat);
    fit.loglik = -0.5 * opt.f;
    fit.loglik_init = -0.5 * f_init;
    fit.converged = opt.converged;
    fit.iterations = opt.iterations;
    fit.evaluations = opt.evaluations;
    fit.low_sample_warning = x1.size() < 2000;
    fit.boundary_estimate =
        mean_transition(fit.params).perron_root() >= kRadiusBarrier - 1e-6;

    ResidualSet rs = extract_residuals(x1, x2, fit.params);
    for (int i = 0; i < 2; ++i) {
        fit.sigma[i] = std::move(rs.sigma[i]);
        fit.residuals[i] = std::move(rs.z[i]);
    }
    fit.reconstruction_repairs = rs.repairs;
    fit.reconstruction_failures = rs.failures;
    return fit;
}

std::vector<double> volatility_filter(std::span<const double> x,
                                      const UnivariateGarchParams& params,
                                      std::optional<double> w0) {
    params.validate();
    if (x.empty()) throw EmptySeries("volatility_filter: empty input");
    double w = w0.value_or(sample_variance(x));
    if (!(w > 0.0)) w = params.a0;
    std::vector<double> sigma(x.size());
    for (size_t t = 0; t < x.size(); ++t) {
        sigma[t] = std::sqrt(w);
        w = params.a0 + params.a1 * x[t] * x[t] + params.b1 * w;
    }
    return sigma;
}

void volatility_filter(std::span<const double> x1, std::span<const double> x2,
                       const BivariateGarchParams& params, std::vector<double>& sigma1,
                       std::vector<double>& sigma2, std::optional<Vec2> w0) {
    params.validate();
    if (x1.size() != x2.size()) throw std::invalid_argument("volatility_filter: size mismatch");
    if (x1.empty()) throw EmptySeries("volatility_filter: empty input");
    Vec2 w = w0.value_or(Vec2{sample_variance(x1), sample_variance(x2)});
    if (!(w[0] > 0.0)) w[0] = params.a0[0];
    if (!(w[1] > 0.0)) w[1] = params.a0[1];
    const size_t n = x1.size();
    sigma1.resize(n);
    sigma2.resize(n);
    for (size_t t = 0; t < n; ++t) {
        sigma1[t] = std::sqrt(w[0]);
        sigma2[t] = std::sqrt(w[1]);
        const Vec2 x_sq{x1[t] * x1[t], x2[t] * x2[t]};
        w = params.a0 + params.alpha * x_sq + params.beta * w;
    }
}

ResidualSet extract_residuals(std::span<const double> x1, std::span<const double> x2,
                              const BivariateGarchParams& params) {
    ResidualSet rs;
    volatility_filter(x1, x2, params, rs.sigma[0], rs.sigma[1], std::nullopt);
    const std::span<const double> cols[2] = {x1, x2};
    for (int i = 0; i < 2; ++i) {
        rs.z[i].resize(cols[i].size());
        for (size_t t = 0; t < cols[i].size(); ++t) {
            if (!exact_reconstruction_pair(cols[i][t], rs.sigma[i][t], rs.z[i][t], &rs.repairs))
                ++rs.failures;
        }
    }
    return rs;
}

namespace {

// Symmetric positive definite solve, Cholesky, no pivoting.
struct SmallSpd {
    int d;
    std::vector<double> l;  // row-major lower factor

    explicit SmallSpd(const std::vector<double>& g, int dim) : d(dim), l(g) {
        for (int i = 0; i < d; ++i) {
            for (int j = 0; j <= i; ++j) {
                double s = l[static_cast<size_t>(i) * d + j];
                for (int k = 0; k < j; ++k)
                    s -= l[static_cast<size_t>(i) * d + k] * l[static_cast<size_t>(j) * d + k];
                if (i == j) {
                    if (!(s > 1e-280)) throw SingularDesign("fit_var: singular design matrix");
                    l[static_cast<size_t>(i) * d + i] = std::sqrt(s);
                } else {
                    l[static_cast<size_t>(i) * d + j] = s / l[static_cast<size_t>(j) * d + j];
                }
            }
        }
    }

    std::vector<double> solve(std::vector<double> b) const {
        for (int i = 0; i < d; ++i) {
            for (int k = 0; k < i; ++k) b[i] -= l[static_cast<size_t>(i) * d + k] * b[k];
            b[i] /= l[static_cast<size_t>(i) * d + i];
        }
        for (int i = d - 1; i >= 0; --i) {
            for (int k = i + 1; k < d; ++k) b[i] -= l[static_cast<size_t>(k) * d + i] * b[k];
            b[i] /= l[static_cast<size_t>(i) * d + i];
        }
        return b;
    }
};

struct VarSolve {
    std::vector<double> coef[2];  // regression coefficients per equation
    double sigma[2][2];           // ML residual covariance
};

// LS fit of both equations on rows t = first..n-1 with regressors
// [1, x1[t-1], x2[t-1], ..., x1[t-p], x2[t-p]].
VarSolve var_least_squares(std::span<const double> x1, std::span<const double> x2, int p,
                           size_t first) {
    const size_t n = x1.size();
    const int d = 1 + 2 * p;
    std::vector<double> g(static_cast<size_t>(d) * d, 0.0);
    std::vector<double> c1(static_cast<size_t>(d), 0.0), c2(static_cast<size_t>(d), 0.0);
    double y11 = 0.0, y22 = 0.0, y12 = 0.0;
    std::vector<double> row(static_cast<size_t>(d));
    const double tn = static_cast<double>(n - first);

    for (size_t t = first; t < n; ++t) {
        row[0] = 1.0;
        for (int l = 1; l <= p; ++l) {
            row[static_cast<size_t>(2 * l - 1)] = x1[t - static_cast<size_t>(l)];
            row[static_cast<size_t>(2 * l)] = x2[t - static_cast<size_t>(l)];
        }
        for (int i = 0; i < d; ++i) {
            for (int j = 0; j <= i; ++j) g[static_cast<size_t>(i) * d + j] += row[i] * row[j];
            c1[static_cast<size_t>(i)] += row[static_cast<size_t>(i)] * x1[t];
            c2[static_cast<size_t>(i)] += row[static_cast<size_t>(i)] * x2[t];
        }
        y11 += x1[t] * x1[t];
        y22 += x2[t] * x2[t];
        y12 += x1[t] * x2[t];
    }
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j)
            g[static_cast<size_t>(i) * d + j] = g[static_cast<size_t>(j) * d + i];

    const SmallSpd chol(g, d);
    VarSolve out;
    out.coef[0] = chol.solve(c1);
    out.coef[1] = chol.solve(c2);

    double q11 = 0.0, q22 = 0.0, q12 = 0.0;
    for (int i = 0; i < d; ++i) {
        q11 += out.coef[0][static_cast<size_t>(i)] * c1[static_cast<size_t>(i)];
        q22 += out.coef[1][static_cast<size_t>(i)] * c2[static_cast<size_t>(i)];
        q12 += out.coef[0][static_cast<size_t>(i)] * c2[static_cast<size_t>(i)];
    }
    out.sigma[0][0] = std::max((y11 - q11) / tn, 1e-300);
    out.sigma[1][1] = std::max((y22 - q22) / tn, 1e-300);
    out.sigma[0][1] = out.sigma[1][0] = (y12 - q12) / tn;
    return out;
}

}  // namespace

VarFit fit_var(std::span<const double> x1, std::span<const double> x2, int max_order,
               VarCriterion criterion) {
    if (x1.size() != x2.size()) throw std::invalid_argument("fit_var: size mismatch");
    if (max_order < 0) throw std::invalid_argument("fit_var: max_order must be >= 0");
    const size_t n = x1.size();
    if (n < static_cast<size_t>(4 * max_order + 16))
        throw std::invalid_argument("fit_var: series too short for max_order");

    const size_t first = static_cast<size_t>(max_order);
    const double t_sel = static_cast<double>(n - first);

    VarFit fit;
    fit.criterion = criterion;
    int best_order = 0;
    double best_value = std::numeric_limits<double>::infinity();
    for (int p = 0; p <= max_order; ++p) {
        const VarSolve sol = var_least_squares(x1, x2, p, first);
        const double det =
            std::max(sol.sigma[0][0] * sol.sigma[1][1] - sol.sigma[0][1] * sol.sigma[1][0], 1e-300);
        double value;
        if (criterion == VarCriterion::Schwarz) {
            value = std::log(det) + p * 4.0 * std::log(t_sel) / t_sel;
        } else {
            const double ratio = (t_sel + 2.0 * p + 1.0) / (t_sel - 2.0 * p - 1.0);
            value = det * ratio * ratio;
        }
        fit.criterion_values.push_back(value);
        if (value < best_value) {
            best_value = value;
            best_order = p;
        }
    }

    fit.order = best_order;
    const VarSolve sol = var_least_squares(x1, x2, best_order, static_cast<size_t>(best_order));
    fit.intercept = {sol.coef[0][0], sol.coef[1][0]};
    fit.coefficients.resize(static_cast<size_t>(best_order));
    for (int l = 1; l <= best_order; ++l)
        fit.coefficients[static_cast<size_t>(l - 1)] = {
            sol.coef[0][static_cast<size_t>(2 * l - 1)], sol.coef[0][static_cast<size_t>(2 * l)],
            sol.coef[1][static_cast<size_t>(2 * l - 1)], sol.coef[1][static_cast<size_t>(2 * l)]};

    // Residuals chosen so fitted + residual == x holds bitwise wherever the
    // sum lattice admits it (iterative correction; the gap x - s is exact
    // once s is within a factor of two of x).
    auto exact_residual = [](double x, double fitted) {
        double r = x - fitted;
        for (int k = 0; k < 8; ++k) {
            const double s = fitted + r;
            if (s == x) break;
            const double next = r + (x - s);
            if (next == r) break;
            r = next;
        }
        return r;
    };
    for (size_t t = static_cast<size_t>(best_order); t < n; ++t) {
        double fit1 = fit.intercept[0], fit2 = fit.intercept[1];
        for (int l = 1; l <= best_order; ++l) {
            fit1 += fit.coefficients[static_cast<size_t>(l - 1)](0, 0) * x1[t - static_cast<size_t>(l)] +
                    fit.coefficients[static_cast<size_t>(l - 1)](0, 1) * x2[t - static_cast<size_t>(l)];
            fit2 += fit.coefficients[static_cast<size_t>(l - 1)](1, 0) * x1[t - static_cast<size_t>(l)] +
                    fit.coefficients[static_cast<size_t>(l - 1)](1, 1) * x2[t - static_cast<size_t>(l)];
        }
        fit.fitted[0].push_back(fit1);
        fit.fitted[1].push_back(fit2);
        fit.residuals[0].push_back(exact_residual(x1[t], fit1));
        fit.residuals[1].push_back(exact_residual(x2[t], fit2));
    }
    return fit;
}

std::vector<std::pair<double, double>> qq_points(std::span<const double> residuals, double df) {
    if (!(df > 0.0)) throw std::invalid_argument("qq_points: df must be > 0");
    if (residuals.empty()) throw EmptySeries("qq_points: empty input");
    std::vector<double> sorted(residuals.begin(), residuals.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::pair<double, double>> pts(sorted.size());
    const double n = static_cast<double>(sorted.size());
    for (size_t i = 0; i < sorted.size(); ++i) {
        const double p = (static_cast<double>(i) + 0.5) / n;
        pts[i] = {standardized_t_quantile(p, df), sorted[i]};
    }
    return pts;
}

}  // namespace extremo
