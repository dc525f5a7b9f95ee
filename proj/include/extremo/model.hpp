#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "extremo/common.hpp"
#include "extremo/rng.hpp"

namespace extremo {

/// Univariate GARCH(1,1): sigma2_t = a0 + (a1*Z_{t-1}^2 + b1) * sigma2_{t-1}.
struct UnivariateGarchParams {
    double a0 = 1e-6;  // intercept, > 0
    double a1 = 0.0;   // ARCH coefficient, >= 0
    double b1 = 0.0;   // GARCH coefficient, >= 0

    void validate() const {
        if (!(a0 > 0.0)) throw std::invalid_argument("UnivariateGarchParams: a0 must be > 0");
        if (a1 < 0.0 || b1 < 0.0)
            throw std::invalid_argument("UnivariateGarchParams: a1, b1 must be >= 0");
    }
};

/// Bivariate constant-conditional-correlation GARCH(1,1). The squared
/// volatility vector W_t follows W_t = A_t W_{t-1} + a0 with random matrix
/// A_t(i,j) = alpha(i,j) * Z_{j,t-1}^2 + beta(i,j).
struct BivariateGarchParams {
    Vec2 a0{1e-6, 1e-6};
    Mat2 alpha;
    Mat2 beta;

    void validate() const {
        if (!(a0[0] > 0.0 && a0[1] > 0.0))
            throw std::invalid_argument("BivariateGarchParams: intercepts must be > 0");
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                if (alpha(i, j) < 0.0 || beta(i, j) < 0.0)
                    throw std::invalid_argument(
                        "BivariateGarchParams: alpha, beta entries must be >= 0");
    }
};

/// E A_1 = alpha + beta (innovations have unit variance).
inline Mat2 mean_transition(const BivariateGarchParams& p) { return p.alpha + p.beta; }

struct StationarityReport {
    double spectral_radius = 0.0;
    bool sufficient_condition_met = false;
    std::optional<double> lyapunov_estimate;
    std::optional<double> lyapunov_se;
};

/// Closed-form dominant eigenvalue of E A_1 and the sufficient condition
/// radius < 1. Total on valid parameters.
StationarityReport spectral_radius_check(const BivariateGarchParams& params);

struct LyapunovEstimate {
    double estimate = 0.0;
    double standard_error = 0.0;
    int n = 0;
    int replicates = 0;
};

/// Top Lyapunov exponent of (A_t): mean over replicates of
/// n^-1 log ||A_1 ... A_n||, operator 2-norm, with per-step renormalization
/// of the running product. Replicate seeds derive from (seed, index), so the
/// result is independent of any parallel scheduling.
LyapunovEstimate lyapunov_exponent(const BivariateGarchParams& params, const Innovation& innov,
                                   int n, int replicates, std::uint64_t seed);

/// Simulated series; univariate paths fill column 0 only.
struct SimulatedPath {
    int cols = 2;
    std::vector<double> x[2];      // returns
    std::vector<double> sigma[2];  // volatilities
    std::vector<double> w[2];      // squared volatilities
    std::vector<double> z[2];      // realized innovations, x = sigma * z exactly
    std::uint64_t seed = 0;
    int burn_in = 0;
    bool stationarity_warning = false;

    size_t size() const { return x[0].size(); }
};

/// sigma2 starts at a0/(1-a1-b1) when a1+b1 < 1, else at a0; the first
/// burn_in points are discarded. Explosive parameter sets simulate fine.
SimulatedPath simulate_univariate(const UnivariateGarchParams& params,
                                  std::optional<double> innov_df, int n, int burn_in,
                                  std::uint64_t seed);

/// W_0 = (I - E A_1)^-1 a0 under the sufficient condition, else a0. Sets
/// stationarity_warning (non-fatal) when the spectral condition fails.
SimulatedPath simulate_bivariate(const BivariateGarchParams& params, const Innovation& innov,
                                 int n, int burn_in, std::uint64_t seed);

struct GrowthConditionReport {
    double lhs_estimate = 0.0;      // E[ min_i (sum_j alpha_ij Z_j^2 + beta_ij)^p ]
    double lhs_se = 0.0;
    double threshold = 0.0;         // 2^(p/2)
    bool satisfied = false;         // lhs >= threshold
    bool moment_condition_ok = false;  // E|Z|^{2p} log+|Z| finite for the family
};

/// Monte-Carlo check of the moment growth condition at exponent p.
/// Rejects p <= 0 and Student-t with 2p >= df (moment analytically infinite).
GrowthConditionReport check_growth_condition(const BivariateGarchParams& params,
                                             const Innovation& innov, double p, long n_mc,
                                             std::uint64_t seed);

}  // namespace extremo
