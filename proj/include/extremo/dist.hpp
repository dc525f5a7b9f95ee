#pragma once

#include <cmath>

namespace extremo {

/// Standard normal density.
inline double normal_pdf(double x) {
    return 0.3989422804014326779399461 * std::exp(-0.5 * x * x);
}

/// Standard normal CDF via erfc.
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x * 0.7071067811865475244008444); }

/// Regularized incomplete beta I_x(a, b), continued fraction (Lentz).
double incomplete_beta(double a, double b, double x);

/// Student-t density with df degrees of freedom.
double student_t_pdf(double x, double df);

/// Student-t CDF with df degrees of freedom.
double student_t_cdf(double x, double df);

/// Student-t quantile; inverts the CDF by bracketing plus Newton polish.
double student_t_quantile(double p, double df);

/// Quantile of the unit-variance (standardized) t for df > 2; raw t below.
double standardized_t_quantile(double p, double df);

/// Log density of the unit-variance standardized t, for likelihoods.
double standardized_t_logpdf(double z, double df);

}  // namespace extremo
