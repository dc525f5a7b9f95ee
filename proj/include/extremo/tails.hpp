#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "extremo/model.hpp"

namespace extremo {

// Tail-index solvers for the squared-volatility recursions. Both work in the
// solver variable s = alpha/2 and return alpha = 2 s*. The density/support
// regularity behind the matrix result is assumed for the continuous
// innovation families and is not checked numerically.

struct TailIndexResult {
    double alpha = 0.0;
    std::pair<double, double> bracket{0.0, 0.0};  // final bracket in s
    std::vector<std::pair<double, double>> moment_curve;  // (s, log-moment) samples
    double mc_se = 0.0;  // standard error of alpha
    long n_mc = 0;
    // Bivariate extras.
    bool bias_warning = false;
    double bias_drift = 0.0;       // |s*(2 n_len) - s*(n_len)|
    bool positivity_warning = false;
    int n_len = 0;
};

/// Root of E[(a1 Z^2 + b1)^s] = 1 by bracketing + bisection on the log moment,
/// one fixed Monte-Carlo sample of Z reused across every s (common random
/// numbers), log-domain throughout. alpha = 2 s*.
///
/// Throws NoRootInRange when the moment stays below 1 on the whole range or
/// E log(a1 Z^2 + b1) >= 0; McDegenerate when a Student-t df caps the usable
/// range (s < df/4) before a sign change.
TailIndexResult tail_index_univariate(const UnivariateGarchParams& params,
                                      std::optional<double> innov_df, long n_mc, double tol,
                                      std::uint64_t seed);

/// Plain fixed-length estimate of n^-1 log E||A_1 ... A_n||^s: accumulated
/// log norms of renormalized products per replicate, combined by log-sum-exp.
/// Useful in the small-s regime; its sampling error explodes exponentially in
/// n_len once s approaches the tail root (see tail_index_bivariate).
double lambda_function(const BivariateGarchParams& params, const Innovation& innov, double s,
                       int n_len, int replicates, std::uint64_t seed);

/// Root of the matrix log-moment growth rate in s. The growth rate at each s
/// is estimated with a sequential-resampling particle scheme (weighted
/// walkers, systematic resampling every step), which keeps the variance
/// polynomial in n_len where the plain replicate average would need
/// exponentially many samples. `replicates` is the total walker budget,
/// split into fixed batches for the standard error. Deterministic given seed.
/// The returned root is for the fixed n_len; the drift against 2*n_len is
/// reported and flags bias_warning when it exceeds tol.
TailIndexResult tail_index_bivariate(const BivariateGarchParams& params, const Innovation& innov,
                                     int n_len, int replicates, double tol, std::uint64_t seed);

struct TheoreticalExtremogram {
    std::vector<double> rho;  // rho_sigma(h), h = 1..max_lag
    std::vector<double> se;
};

/// rho_sigma(h) = E[min(1, Pi_h^(alpha/2))] with Pi_h the running product of
/// a1 Z^2 + b1, cumulative products reused across lags.
TheoreticalExtremogram theoretical_extremogram_sigma(const UnivariateGarchParams& params,
                                                     std::optional<double> innov_df, double alpha,
                                                     int max_lag, long n_mc, std::uint64_t seed);

struct DecayEnvelope {
    std::vector<double> value;  // (E[A^p])^h, h = 1..max_lag
    double base = 0.0;          // E[A^p]
    double base_se = 0.0;
};

/// Geometric envelope (E[A_0^p])^h with the base moment estimated once.
/// When alpha is supplied, p >= alpha/2 is rejected (the bound needs p < alpha/2).
DecayEnvelope decay_envelope(const UnivariateGarchParams& params, std::optional<double> innov_df,
                             double p, int max_lag, long n_mc, std::uint64_t seed,
                             std::optional<double> alpha = std::nullopt);

}  // namespace extremo
