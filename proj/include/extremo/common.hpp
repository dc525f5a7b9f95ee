#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace extremo {

/// 2-vector with value semantics; indices are component ids (0, 1).
struct Vec2 {
    double v[2]{0.0, 0.0};

    Vec2() = default;
    Vec2(double a, double b) : v{a, b} {}

    double& operator[](int i) { return v[i]; }
    double operator[](int i) const { return v[i]; }

    Vec2 operator+(const Vec2& o) const { return {v[0] + o.v[0], v[1] + o.v[1]}; }
    Vec2 operator-(const Vec2& o) const { return {v[0] - o.v[0], v[1] - o.v[1]}; }
    Vec2 operator*(double c) const { return {v[0] * c, v[1] * c}; }

    double norm() const { return std::hypot(v[0], v[1]); }
};

/// Dense 2x2 matrix, row major.
struct Mat2 {
    double m[2][2]{{0.0, 0.0}, {0.0, 0.0}};

    Mat2() = default;
    Mat2(double a00, double a01, double a10, double a11) : m{{a00, a01}, {a10, a11}} {}

    static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }

    double& operator()(int i, int j) { return m[i][j]; }
    double operator()(int i, int j) const { return m[i][j]; }

    Mat2 operator+(const Mat2& o) const {
        return {m[0][0] + o.m[0][0], m[0][1] + o.m[0][1], m[1][0] + o.m[1][0], m[1][1] + o.m[1][1]};
    }
    Mat2 operator*(const Mat2& o) const {
        return {m[0][0] * o.m[0][0] + m[0][1] * o.m[1][0], m[0][0] * o.m[0][1] + m[0][1] * o.m[1][1],
                m[1][0] * o.m[0][0] + m[1][1] * o.m[1][0], m[1][0] * o.m[0][1] + m[1][1] * o.m[1][1]};
    }
    Vec2 operator*(const Vec2& x) const {
        return {m[0][0] * x[0] + m[0][1] * x[1], m[1][0] * x[0] + m[1][1] * x[1]};
    }
    Mat2 operator*(double c) const { return {m[0][0] * c, m[0][1] * c, m[1][0] * c, m[1][1] * c}; }

    double det() const { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }
    double trace() const { return m[0][0] + m[1][1]; }
    double frobenius_sq() const {
        return m[0][0] * m[0][0] + m[0][1] * m[0][1] + m[1][0] * m[1][0] + m[1][1] * m[1][1];
    }

    /// Operator 2-norm (largest singular value), closed form for 2x2.
    double norm2() const {
        const double f = frobenius_sq();
        const double d = det();
        const double disc = std::max(0.0, f * f - 4.0 * d * d);
        return std::sqrt(0.5 * (f + std::sqrt(disc)));
    }

    /// Dominant eigenvalue of a nonnegative matrix:
    /// (a00+a11)/2 + sqrt(((a00-a11)/2)^2 + a01*a10).
    double perron_root() const {
        const double half_sum = 0.5 * (m[0][0] + m[1][1]);
        const double half_diff = 0.5 * (m[0][0] - m[1][1]);
        return half_sum + std::sqrt(half_diff * half_diff + m[0][1] * m[1][0]);
    }

    /// Inverse; throws on a (near-)singular matrix.
    Mat2 inverse() const {
        const double d = det();
        if (d == 0.0 || !std::isfinite(1.0 / d))
            throw std::runtime_error("Mat2::inverse: singular matrix");
        return {m[1][1] / d, -m[0][1] / d, -m[1][0] / d, m[0][0] / d};
    }
};

/// log(sum(exp(v))) without overflow.
inline double log_sum_exp(std::span<const double> v) {
    if (v.empty()) return -std::numeric_limits<double>::infinity();
    double m = v[0];
    for (double x : v)
        if (x > m) m = x;
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

inline double mean_of(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

inline double variance_of(std::span<const double> v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size() - 1);
}

inline double sd_of(std::span<const double> v) { return std::sqrt(variance_of(v)); }

/// Standard error of the mean.
inline double se_of(std::span<const double> v) {
    return v.size() < 2 ? 0.0 : sd_of(v) / std::sqrt(static_cast<double>(v.size()));
}

inline double correlation_of(std::span<const double> a, std::span<const double> b) {
    const size_t n = std::min(a.size(), b.size());
    if (n < 2) return 0.0;
    double ma = 0.0, mb = 0.0;
    for (size_t i = 0; i < n; ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= static_cast<double>(n);
    mb /= static_cast<double>(n);
    double saa = 0.0, sbb = 0.0, sab = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double da = a[i] - ma, db = b[i] - mb;
        saa += da * da;
        sbb += db * db;
        sab += da * db;
    }
    const double denom = std::sqrt(saa * sbb);
    return denom > 0.0 ? sab / denom : 0.0;
}

/// Empirical q-quantile as the order statistic of rank ceil(q*n) (1-indexed),
/// no interpolation; rank clamped to [1, n].
double empirical_quantile(std::span<const double> v, double q);

/// Makes sigma*z == x hold bitwise by (rarely) moving sigma a few ulps.
/// Returns true on success; increments *repairs when sigma moved.
/// On failure leaves z = x/sigma and returns false.
bool exact_reconstruction_pair(double x, double& sigma, double& z, long* repairs);

// Error taxonomy shared across modules.
struct NoRootInRange : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct McDegenerate : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ZeroDenominator : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ZeroVariance : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DegenerateSeries : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SingularDesign : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct EmptySeries : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct FileNotFound : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ParseError : std::runtime_error {
    ParseError(std::string msg, long row_, std::string column_)
        : std::runtime_error(std::move(msg)), row(row_), column(std::move(column_)) {}
    long row;
    std::string column;
};

}  // namespace extremo
