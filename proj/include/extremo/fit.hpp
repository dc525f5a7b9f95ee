#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "extremo/model.hpp"

namespace extremo {

// Estimation: componentwise univariate fits (Gaussian quasi-likelihood or
// exact standardized-t likelihood) and the bivariate constant-correlation
// Gaussian QMLE, plus VAR pre-whitening and residual diagnostics.
//
// All fits optimize on unconstrained scales (log for positive parameters,
// atanh for the correlation) with a derivative-free simplex and one restart
// from a deterministically perturbed start; the reported loglik is never
// below the value at the initial point.

struct UnivariateFit {
    UnivariateGarchParams params;
    std::optional<double> df_hat;      // t-MLE only
    double loglik = 0.0;
    double loglik_init = 0.0;
    bool converged = false;
    int iterations = 0;
    long evaluations = 0;
    UnivariateGarchParams init;
    std::vector<double> sigma;         // filtered volatilities (stored, see below)
    std::vector<double> residuals;     // x / sigma, with sigma * residual == x bitwise
    bool low_sample_warning = false;
    long reconstruction_repairs = 0;   // stored sigmas moved by a few ulps
    long reconstruction_failures = 0;  // elements where no exact pair exists
};

/// Gaussian quasi-MLE of (a0, a1, b1): maximizes
/// -1/2 sum_t [log sigma2_t + x_t^2 / sigma2_t] with sigma2_0 = sample
/// variance. Throws DegenerateSeries on a constant input; sets
/// low_sample_warning below 500 observations. grid_restart additionally
/// seeds starts from a step-0.1 grid over (a1, b1).
UnivariateFit fit_univariate_qmle(std::span<const double> x,
                                  std::optional<UnivariateGarchParams> init = std::nullopt,
                                  bool grid_restart = false);

/// Exact MLE under unit-variance Student-t innovations; df enforced > 2 via
/// df = 2 + exp(u). Returns df_hat.
UnivariateFit fit_univariate_t_mle(std::span<const double> x,
                                   std::optional<UnivariateGarchParams> init = std::nullopt,
                                   std::optional<double> df_init = std::nullopt,
                                   bool grid_restart = false);

struct BivariateInit {
    BivariateGarchParams params;
    double rho = 0.0;
};

struct BivariateFit {
    BivariateGarchParams params;
    double rho_hat = 0.0;
    double loglik = 0.0;
    double loglik_init = 0.0;
    bool converged = false;
    int iterations = 0;
    long evaluations = 0;
    bool boundary_estimate = false;  // estimate pinned at the stationarity barrier
    BivariateGarchParams init_params;
    double rho_init = 0.0;
    std::vector<double> sigma[2];
    std::vector<double> residuals[2];
    bool low_sample_warning = false;
    long reconstruction_repairs = 0;
    long reconstruction_failures = 0;
};

/// Bivariate Gaussian QMLE of the constant-correlation model: with
/// D_t = diag(sigma_1t, sigma_2t) and H_t = D_t P D_t,
///   l = -1/2 sum_t [log det H_t + X_t' H_t^-1 X_t],
/// det H_t = sigma2_1t sigma2_2t (1 - rho^2) in closed form. Eleven free
/// parameters; points whose mean-transition spectral radius reaches
/// 1 - 1e-4 are rejected by a barrier, mirroring estimation under the
/// sufficient stationarity condition; boundary_estimate reports an estimate
/// pinned there. Default start: componentwise Gaussian fits, off-diagonals
/// at 0.01, rho from the correlation of standardized residuals.
BivariateFit fit_bivariate_qmle(std::span<const double> x1, std::span<const double> x2,
                                std::optional<BivariateInit> init = std::nullopt,
                                bool grid_restart = false);

/// Forward filter sigma2_t = a0 + a1 x_{t-1}^2 + b1 sigma2_{t-1} from
/// w0 (default: sample variance of x); returns volatilities sqrt(sigma2).
std::vector<double> volatility_filter(std::span<const double> x,
                                      const UnivariateGarchParams& params,
                                      std::optional<double> w0 = std::nullopt);

/// Bivariate filter W_t = a0 + alpha X2_{t-1} + beta W_{t-1} from w0
/// (default: componentwise sample variances).
void volatility_filter(std::span<const double> x1, std::span<const double> x2,
                       const BivariateGarchParams& params, std::vector<double>& sigma1,
                       std::vector<double>& sigma2,
                       std::optional<Vec2> w0 = std::nullopt);

struct ResidualSet {
    std::vector<double> sigma[2];
    std::vector<double> z[2];  // sigma[i][t] * z[i][t] == x[i][t] bitwise
    long repairs = 0;
    long failures = 0;
};

/// Filtered volatilities and residuals Z_t = X_t / sigma_t; the stored pairs
/// satisfy the reconstruction identity exactly (ulp-level sigma repair,
/// counted in repairs/failures).
ResidualSet extract_residuals(std::span<const double> x1, std::span<const double> x2,
                              const BivariateGarchParams& params);

enum class VarCriterion { Schwarz, FPE };

struct VarFit {
    int order = 0;
    std::vector<Mat2> coefficients;        // lag 1..order
    Vec2 intercept;
    std::vector<double> fitted[2];         // rows order+1..n
    std::vector<double> residuals[2];      // fitted + residual == x bitwise
    std::vector<double> criterion_values;  // per order 0..max_order
    VarCriterion criterion = VarCriterion::Schwarz;
};

/// Least-squares VAR(p) for p = 0..max_order; the criterion is evaluated on
/// the common sample t = max_order+1..n, the winning order refit on its full
/// sample. Schwarz: log det(SigmaHat) + p k^2 log(T)/T; FPE:
/// det(SigmaHat) ((T + kp + 1)/(T - kp - 1))^k.
VarFit fit_var(std::span<const double> x1, std::span<const double> x2, int max_order,
               VarCriterion criterion);

/// QQ points: sorted residuals against unit-variance t(df) quantiles at
/// plotting positions (i - 0.5)/n (raw t quantiles when df <= 2).
std::vector<std::pair<double, double>> qq_points(std::span<const double> residuals, double df);

}  // namespace extremo
