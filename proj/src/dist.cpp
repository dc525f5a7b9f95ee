#include "extremo/dist.hpp"

#include <limits>
#include <stdexcept>

namespace extremo {

namespace {

// Lentz's continued fraction for the incomplete beta.
double betacf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 3e-16;
    constexpr double kFpMin = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0 && b > 0.0)) throw std::invalid_argument("incomplete_beta: a, b must be > 0");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                         a * std::log(x) + b * std::log1p(-x);
    const double bt = std::exp(ln_bt);
    if (x < (a + 1.0) / (a + b + 2.0)) return bt * betacf(a, b, x) / a;
    return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

double student_t_pdf(double x, double df) {
    const double lc = std::lgamma(0.5 * (df + 1.0)) - std::lgamma(0.5 * df) -
                      0.5 * std::log(df * 3.14159265358979323846);
    return std::exp(lc - 0.5 * (df + 1.0) * std::log1p(x * x / df));
}

double student_t_cdf(double x, double df) {
    if (!(df > 0.0)) throw std::invalid_argument("student_t_cdf: df must be > 0");
    if (x == 0.0) return 0.5;
    const double p = 0.5 * incomplete_beta(0.5 * df, 0.5, df / (df + x * x));
    return x > 0.0 ? 1.0 - p : p;
}

double student_t_quantile(double p, double df) {
    if (!(df > 0.0)) throw std::invalid_argument("student_t_quantile: df must be > 0");
    if (!(p > 0.0 && p < 1.0)) {
        if (p == 0.0) return -std::numeric_limits<double>::infinity();
        if (p == 1.0) return std::numeric_limits<double>::infinity();
        throw std::invalid_argument("student_t_quantile: p must lie in [0, 1]");
    }
    if (p == 0.5) return 0.0;

    // Bracket, bisect, then polish with Newton.
    double lo = -1.0, hi = 1.0;
    while (student_t_cdf(lo, df) > p) lo *= 2.0;
    while (student_t_cdf(hi, df) < p) hi *= 2.0;
    double x = 0.5 * (lo + hi);
    for (int i = 0; i < 200; ++i) {
        x = 0.5 * (lo + hi);
        if (hi - lo < 1e-14 * (1.0 + std::fabs(x))) break;
        (student_t_cdf(x, df) < p ? lo : hi) = x;
    }
    for (int i = 0; i < 3; ++i) {
        const double f = student_t_cdf(x, df) - p;
        const double d = student_t_pdf(x, df);
        if (d <= 0.0) break;
        const double step = f / d;
        if (!std::isfinite(step)) break;
        x -= step;
    }
    return x;
}

double standardized_t_quantile(double p, double df) {
    const double q = student_t_quantile(p, df);
    return df > 2.0 ? q * std::sqrt((df - 2.0) / df) : q;
}

double standardized_t_logpdf(double z, double df) {
    // Density of Z = T * sqrt((df-2)/df) with T ~ t(df); unit variance, df > 2.
    const double s = df - 2.0;
    const double lc = std::lgamma(0.5 * (df + 1.0)) - std::lgamma(0.5 * df) -
                      0.5 * std::log(s * 3.14159265358979323846);
    return lc - 0.5 * (df + 1.0) * std::log1p(z * z / s);
}

}  // namespace extremo
