#include "extremo/tails.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace extremo {

namespace {

constexpr double kBracketLow = 1e-3;
constexpr double kBracketHigh = 10.0;
constexpr double kBracketCap = 64.0;

double student_t_s_cap(std::optional<double> df) {
    // Second-moment guard: the sampled moment of order 2s of Z is infinite
    // once 4s >= df.
    return df ? 0.25 * *df * (1.0 - 1e-9) : kBracketCap;
}

struct ScalarMoment {
    // log h(s) = log mean exp(s * la_i); exactly convex in s, 0 at s = 0.
    std::vector<double> la;
    mutable std::vector<double> scratch;

    double operator()(double s) const {
        scratch.resize(la.size());
        for (size_t i = 0; i < la.size(); ++i) scratch[i] = s * la[i];
        return log_sum_exp(scratch) - std::log(static_cast<double>(la.size()));
    }

    double batch_se(double s, int n_batches) const {
        const size_t bsz = la.size() / static_cast<size_t>(n_batches);
        std::vector<double> vals;
        std::vector<double> buf;
        for (int b = 0; b < n_batches; ++b) {
            buf.clear();
            for (size_t i = static_cast<size_t>(b) * bsz; i < static_cast<size_t>(b + 1) * bsz; ++i)
                buf.push_back(s * la[i]);
            vals.push_back(log_sum_exp(buf) - std::log(static_cast<double>(bsz)));
        }
        return se_of(vals);
    }
};

struct RootSearch {
    double root = 0.0;
    double lo = 0.0, hi = 0.0;
    std::vector<std::pair<double, double>> curve;
};

// Bracket + bisection on a convex log-moment through (0, 0). `f` must be
// increasing at its positive root.
template <typename F>
RootSearch solve_log_moment_root(const F& f, double s_cap, double tol, bool t_capped,
                                 const char* what) {
    RootSearch rs;
    auto eval = [&](double s) {
        const double v = f(s);
        rs.curve.emplace_back(s, v);
        return v;
    };

    double lo = kBracketLow;
    if (eval(lo) > 0.0)
        throw NoRootInRange(std::string(what) +
                            ": log-moment positive at s -> 0 (E log A >= 0; no positive root)");
    double hi = std::min(kBracketHigh, s_cap);
    while (eval(hi) < 0.0) {
        lo = hi;
        if (hi >= s_cap * (1.0 - 1e-12)) {
            if (t_capped)
                throw McDegenerate(std::string(what) +
                                   ": no sign change below the Student-t moment cap s < df/4");
            throw NoRootInRange(std::string(what) +
                                ": log-moment below 0 on the whole search range");
        }
        hi = std::min(hi * 2.0, s_cap);
    }
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (eval(mid) < 0.0 ? lo : hi) = mid;
    }
    rs.root = 0.5 * (lo + hi);
    rs.lo = lo;
    rs.hi = hi;
    std::sort(rs.curve.begin(), rs.curve.end());
    rs.curve.erase(std::unique(rs.curve.begin(), rs.curve.end(),
                               [](const auto& a, const auto& b) { return a.first == b.first; }),
                   rs.curve.end());
    return rs;
}

template <typename F>
double slope_at(const F& f, double s, double s_cap) {
    const double delta = std::min(std::max(0.02 * s, 1e-3), 0.45 * (s_cap - s));
    return (f(s + delta) - f(s - delta)) / (2.0 * delta);
}

Mat2 transition_matrix(const BivariateGarchParams& p, double z0_sq, double z1_sq) {
    return {p.alpha(0, 0) * z0_sq + p.beta(0, 0), p.alpha(0, 1) * z1_sq + p.beta(0, 1),
            p.alpha(1, 0) * z0_sq + p.beta(1, 0), p.alpha(1, 1) * z1_sq + p.beta(1, 1)};
}

// One particle population: walkers carry unit-norm matrices; each step
// multiplies by an independent transition draw, weights by ||A M||^s, records
// the mean weight in log domain and resamples systematically. The summed log
// mean-weights estimate log E||A_1...A_n||^s with variance O(n/K).
double lambda_resampled(const BivariateGarchParams& params, const Innovation& innov, double s,
                        int n_len, int n_walkers, std::uint64_t seed) {
    Rng rng(seed);
    InnovationSampler sampler(innov, rng);
    const size_t k = static_cast<size_t>(n_walkers);
    std::vector<Mat2> walkers(k, Mat2::identity());
    std::vector<Mat2> next(k);
    std::vector<double> weight(k), cumulative(k);

    double total_log = 0.0;
    for (int t = 0; t < n_len; ++t) {
        double max_logw = -std::numeric_limits<double>::infinity();
        for (size_t i = 0; i < k; ++i) {
            const ZPair zp = sampler.draw();
            Mat2 m = transition_matrix(params, zp.z0 * zp.z0, zp.z1 * zp.z1) * walkers[i];
            const double nrm = m.norm2();
            walkers[i] = m * (1.0 / nrm);
            weight[i] = s * std::log(nrm);
            max_logw = std::max(max_logw, weight[i]);
        }
        double wsum = 0.0;
        for (size_t i = 0; i < k; ++i) {
            weight[i] = std::exp(weight[i] - max_logw);
            wsum += weight[i];
            cumulative[i] = wsum;
        }
        total_log += max_logw + std::log(wsum / static_cast<double>(k));

        // Systematic resampling.
        const double step = wsum / static_cast<double>(k);
        double pos = rng.uniform01() * step;
        size_t src = 0;
        for (size_t i = 0; i < k; ++i) {
            while (src + 1 < k && cumulative[src] < pos) ++src;
            next[i] = walkers[src];
            pos += step;
        }
        walkers.swap(next);
    }
    return total_log / static_cast<double>(n_len);
}

struct BatchedLambda {
    const BivariateGarchParams& params;
    const Innovation& innov;
    int n_len;
    int walkers_per_batch;
    int n_batches;
    std::uint64_t seed;
    std::uint64_t stream_salt;

    double operator()(double s) const { return mean_of(batches(s)); }

    std::vector<double> batches(double s) const {
        std::vector<double> vals(static_cast<size_t>(n_batches));
        for (int b = 0; b < n_batches; ++b)
            vals[static_cast<size_t>(b)] =
                lambda_resampled(params, innov, s, n_len, walkers_per_batch,
                                 Rng::derive(seed, stream_salt + static_cast<std::uint64_t>(b)));
        return vals;
    }
};

}  // namespace

TailIndexResult tail_index_univariate(const UnivariateGarchParams& params,
                                      std::optional<double> innov_df, long n_mc, double tol,
                                      std::uint64_t seed) {
    params.validate();
    if (!(params.a1 > 0.0))
        throw std::invalid_argument("tail_index_univariate: a1 must be > 0 (random coefficient)");
    if (n_mc < 32) throw std::invalid_argument("tail_index_univariate: n_mc too small");
    if (!(tol > 0.0)) throw std::invalid_argument("tail_index_univariate: tol must be > 0");

    ScalarMoment moment;
    moment.la.resize(static_cast<size_t>(n_mc));
    {
        Rng rng(seed);
        for (long i = 0; i < n_mc; ++i) {
            const double z = draw_standardized(rng, innov_df);
            moment.la[static_cast<size_t>(i)] = std::log(params.a1 * z * z + params.b1);
        }
    }

    const double s_cap = student_t_s_cap(innov_df);
    RootSearch rs = solve_log_moment_root(moment, s_cap, tol, innov_df.has_value(),
                                          "tail_index_univariate");

    const double slope = slope_at(moment, rs.root, s_cap);
    if (!(slope > 0.0))
        throw NoRootInRange("tail_index_univariate: moment curve not increasing at the root");

    TailIndexResult res;
    res.alpha = 2.0 * rs.root;
    res.bracket = {rs.lo, rs.hi};
    res.n_mc = n_mc;
    res.mc_se = 2.0 * moment.batch_se(rs.root, 16) / slope;
    // Curve samples plus a coarse grid from 0 for convexity diagnostics.
    res.moment_curve = std::move(rs.curve);
    for (int i = 0; i <= 8; ++i) {
        const double s = rs.hi * static_cast<double>(i) / 8.0;
        res.moment_curve.emplace_back(s, s == 0.0 ? 0.0 : moment(s));
    }
    std::sort(res.moment_curve.begin(), res.moment_curve.end());
    return res;
}

double lambda_function(const BivariateGarchParams& params, const Innovation& innov, double s,
                       int n_len, int replicates, std::uint64_t seed) {
    params.validate();
    innov.validate();
    if (!(s > 0.0)) throw std::invalid_argument("lambda_function: s must be > 0");
    if (n_len < 1) throw std::invalid_argument("lambda_function: n_len must be >= 1");
    if (replicates < 2) throw std::invalid_argument("lambda_function: replicates must be >= 2");

    std::vector<double> scaled(static_cast<size_t>(replicates));
    for (int r = 0; r < replicates; ++r) {
        Rng rng(Rng::derive(seed, static_cast<std::uint64_t>(r)));
        InnovationSampler sampler(innov, rng);
        Mat2 prod = Mat2::identity();
        double log_norm = 0.0;
        for (int t = 0; t < n_len; ++t) {
            const ZPair zp = sampler.draw();
            prod = transition_matrix(params, zp.z0 * zp.z0, zp.z1 * zp.z1) * prod;
            const double nrm = prod.norm2();
            log_norm += std::log(nrm);
            prod = prod * (1.0 / nrm);
        }
        scaled[static_cast<size_t>(r)] = s * log_norm;
    }
    return (log_sum_exp(scaled) - std::log(static_cast<double>(replicates))) /
           static_cast<double>(n_len);
}

TailIndexResult tail_index_bivariate(const BivariateGarchParams& params, const Innovation& innov,
                                     int n_len, int replicates, double tol, std::uint64_t seed) {
    params.validate();
    innov.validate();
    if (n_len < 2) throw std::invalid_argument("tail_index_bivariate: n_len must be >= 2");
    if (replicates < 64) throw std::invalid_argument("tail_index_bivariate: replicates too small");
    if (!(tol > 0.0)) throw std::invalid_argument("tail_index_bivariate: tol must be > 0");

    bool positive_entries = true;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            if (!(params.alpha(i, j) > 0.0 || params.beta(i, j) > 0.0)) positive_entries = false;

    constexpr int kBatches = 8;
    const int per_batch = std::max(replicates / kBatches, 8);
    const std::optional<double> df =
        innov.family == Innovation::Family::StudentT ? std::optional<double>(innov.df)
                                                     : std::nullopt;
    const double s_cap = student_t_s_cap(df);

    BatchedLambda lam{params, innov, n_len, per_batch, kBatches, seed, 0};
    RootSearch rs = solve_log_moment_root(lam, s_cap, tol, df.has_value(),
                                          "tail_index_bivariate");

    const double slope = slope_at(lam, rs.root, s_cap);
    if (!(slope > 0.0))
        throw NoRootInRange("tail_index_bivariate: moment curve not increasing at the root");

    TailIndexResult res;
    res.alpha = 2.0 * rs.root;
    res.bracket = {rs.lo, rs.hi};
    res.n_mc = static_cast<long>(per_batch) * kBatches;
    res.n_len = n_len;
    res.positivity_warning = !positive_entries;
    res.mc_se = 2.0 * se_of(lam.batches(rs.root)) / slope;
    res.moment_curve = std::move(rs.curve);

    // Fixed-length bias diagnostic: redo the root at twice the length.
    BatchedLambda lam2{params, innov, 2 * n_len, per_batch, kBatches, seed, 1000003};
    const RootSearch rs2 = solve_log_moment_root(lam2, s_cap, tol, df.has_value(),
                                                 "tail_index_bivariate(bias diagnostic)");
    res.bias_drift = std::fabs(rs2.root - rs.root);
    res.bias_warning = res.bias_drift > tol;
    return res;
}

TheoreticalExtremogram theoretical_extremogram_sigma(const UnivariateGarchParams& params,
                                                     std::optional<double> innov_df, double alpha,
                                                     int max_lag, long n_mc, std::uint64_t seed) {
    params.validate();
    if (!(alpha > 0.0))
        throw std::invalid_argument("theoretical_extremogram_sigma: alpha must be > 0");
    if (max_lag < 1)
        throw std::invalid_argument("theoretical_extremogram_sigma: max_lag must be >= 1");
    if (n_mc < 2) throw std::invalid_argument("theoretical_extremogram_sigma: n_mc too small");

    const double half_alpha = 0.5 * alpha;
    std::vector<double> sum(static_cast<size_t>(max_lag), 0.0);
    std::vector<double> sum_sq(static_cast<size_t>(max_lag), 0.0);
    Rng rng(seed);
    for (long i = 0; i < n_mc; ++i) {
        double log_pi = 0.0;
        for (int h = 0; h < max_lag; ++h) {
            const double z = draw_standardized(rng, innov_df);
            log_pi += std::log(params.a1 * z * z + params.b1);
            const double v = log_pi >= 0.0 ? 1.0 : std::exp(half_alpha * log_pi);
            sum[static_cast<size_t>(h)] += v;
            sum_sq[static_cast<size_t>(h)] += v * v;
        }
    }
    TheoreticalExtremogram out;
    out.rho.resize(static_cast<size_t>(max_lag));
    out.se.resize(static_cast<size_t>(max_lag));
    const double nd = static_cast<double>(n_mc);
    for (int h = 0; h < max_lag; ++h) {
        const double m = sum[static_cast<size_t>(h)] / nd;
        out.rho[static_cast<size_t>(h)] = m;
        const double var = std::max(0.0, sum_sq[static_cast<size_t>(h)] / nd - m * m);
        out.se[static_cast<size_t>(h)] = std::sqrt(var / nd);
    }
    return out;
}

DecayEnvelope decay_envelope(const UnivariateGarchParams& params, std::optional<double> innov_df,
                             double p, int max_lag, long n_mc, std::uint64_t seed,
                             std::optional<double> alpha) {
    params.validate();
    if (!(p > 0.0)) throw std::invalid_argument("decay_envelope: p must be > 0");
    if (max_lag < 1) throw std::invalid_argument("decay_envelope: max_lag must be >= 1");
    if (n_mc < 2) throw std::invalid_argument("decay_envelope: n_mc too small");
    if (alpha && !(p < 0.5 * *alpha))
        throw std::invalid_argument("decay_envelope: the bound needs p < alpha/2");

    Rng rng(seed);
    double sum = 0.0, sum_sq = 0.0;
    for (long i = 0; i < n_mc; ++i) {
        const double z = draw_standardized(rng, innov_df);
        const double v = std::pow(params.a1 * z * z + params.b1, p);
        sum += v;
        sum_sq += v * v;
    }
    DecayEnvelope env;
    const double nd = static_cast<double>(n_mc);
    env.base = sum / nd;
    env.base_se = std::sqrt(std::max(0.0, sum_sq / nd - env.base * env.base) / nd);
    env.value.resize(static_cast<size_t>(max_lag));
    double acc = 1.0;
    for (int h = 0; h < max_lag; ++h) {
        acc *= env.base;
        env.value[static_cast<size_t>(h)] = acc;
    }
    return env;
}

}  // namespace extremo
