#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "extremo/common.hpp"

namespace extremo {

/// Tail event set, bounded away from zero: UpperRay is (c, inf), LowerRay is
/// (-inf, -c), c defaulting to 1.
struct TailSet {
    enum class Kind { UpperRay, LowerRay };
    Kind kind = Kind::UpperRay;
    double c = 1.0;

    void validate() const {
        if (!(c > 0.0)) throw std::invalid_argument("TailSet: c must be > 0");
    }
};

struct ExtremogramConfig {
    double m = 50.0;   // threshold level is the (1 - 1/m) quantile
    int max_lag = 40;
    TailSet set_a;     // conditioning set (applied to the row component)
    TailSet set_b;     // target set (applied to the column component)

    void validate() const {
        if (!(m > 1.0)) throw std::invalid_argument("ExtremogramConfig: m must be > 1");
        if (max_lag < 1) throw std::invalid_argument("ExtremogramConfig: max_lag must be >= 1");
        set_a.validate();
        set_b.validate();
    }
};

/// One 2x2 panel per lag; entry (i, j) conditions on component i and targets
/// component j.
struct LagPanel {
    double v[2][2]{{0.0, 0.0}, {0.0, 0.0}};
    double& operator()(int i, int j) { return v[i][j]; }
    double operator()(int i, int j) const { return v[i][j]; }
};

struct LagCounts {
    long v[2][2]{{0, 0}, {0, 0}};
};

struct ExtremogramResult {
    std::vector<LagPanel> rho;       // lags 0..max_lag
    std::vector<LagCounts> num;      // integer numerators per lag
    std::array<long, 2> denom{0, 0};
    std::array<double, 2> scale_a{0.0, 0.0};  // realized scale per component, set A
    std::array<double, 2> scale_b{0.0, 0.0};  // realized scale per component, set B
    std::array<long, 2> exceed_counts{0, 0};
    bool low_count_warning = false;

    std::optional<LagPanel> band;    // one level per panel
    struct BandMeta {
        int n_perm = 0;
        double band_quantile = 0.0;
        std::uint64_t seed = 0;
    };
    std::optional<BandMeta> band_meta;

    int max_lag() const { return static_cast<int>(rho.size()) - 1; }
};

/// Sample extremogram and cross-extremogram of a bivariate series:
/// for each ordered pair (i, j) and lag h,
///   numerator   = #{ t in 1..n-h : X_j,t+h in q_j B and X_i,t in q_i A }
///   denominator = #{ t in 1..n   : X_i,t in q_i A }
/// with q the componentwise empirical scale: the (1-1/m) upper order
/// statistic (rank ceil((1-1/m) n), no interpolation) for UpperRay sets and
/// the magnitude of the (1/m) order statistic for LowerRay sets.
/// Throws ZeroDenominator when a conditioning component has no exceedances;
/// sets low_count_warning below 20 exceedances.
ExtremogramResult sample_extremogram(std::span<const double> x1, std::span<const double> x2,
                                     const ExtremogramConfig& cfg);

/// Same estimator with caller-supplied scales (used by tests and callers that
/// fix thresholds externally).
ExtremogramResult sample_extremogram_with_scales(std::span<const double> x1,
                                                 std::span<const double> x2,
                                                 const ExtremogramConfig& cfg,
                                                 const std::array<double, 2>& scale_a,
                                                 const std::array<double, 2>& scale_b);

/// Permutation confidence level per panel: n_perm uniform random joint row
/// permutations, the band_quantile empirical quantile of the permuted
/// extremogram at each lag 1..max_lag, then the maximum over those lags.
/// Lag 0 is excluded on every panel: joint permutations leave lag-0 values
/// unchanged, so including it would peg the band at the observed value.
LagPanel permutation_bands(std::span<const double> x1, std::span<const double> x2,
                           const ExtremogramConfig& cfg, int n_perm, double band_quantile,
                           std::uint64_t seed);

/// Componentwise rank transform to Student-t(target_df) marginals:
/// x_t -> G^-1(rank_t / (n+1)) with average ranks on ties.
std::vector<double> quantile_transform(std::span<const double> x, double target_df);

/// Sample auto/cross-correlations at lags 0..max_lag; entry (i, j) at lag h
/// is corr(X_i,t, X_j,t+h) with full-sample mean and variance normalization.
std::vector<LagPanel> sample_ccf(std::span<const double> x1, std::span<const double> x2,
                                 int max_lag);

/// Per-slot exceedance counts: for each column, counts t with t % period == s
/// and x_t above the column's empirical q-quantile.
std::vector<std::vector<long>> exceedance_clock_profile(
    const std::vector<std::vector<double>>& columns, int period, double q);

}  // namespace extremo
