#include "extremo/extremogram.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>

#include "extremo/dist.hpp"
#include "extremo/rng.hpp"

namespace extremo {

namespace {

inline bool in_tail(double x, const TailSet& set, double scale) {
    return set.kind == TailSet::Kind::UpperRay ? x > scale * set.c : x < -(scale * set.c);
}

double tail_scale(std::span<const double> x, const TailSet& set, double m) {
    if (set.kind == TailSet::Kind::UpperRay) return empirical_quantile(x, 1.0 - 1.0 / m);
    return std::fabs(empirical_quantile(x, 1.0 / m));
}

std::vector<unsigned char> indicator(std::span<const double> x, const TailSet& set, double scale) {
    std::vector<unsigned char> ind(x.size());
    for (size_t t = 0; t < x.size(); ++t) ind[t] = in_tail(x[t], set, scale) ? 1 : 0;
    return ind;
}

struct Indicators {
    std::vector<unsigned char> a[2];
    std::vector<unsigned char> b[2];
    std::array<long, 2> denom{0, 0};
};

Indicators build_indicators(std::span<const double> x1, std::span<const double> x2,
                            const ExtremogramConfig& cfg, const std::array<double, 2>& scale_a,
                            const std::array<double, 2>& scale_b) {
    Indicators ind;
    ind.a[0] = indicator(x1, cfg.set_a, scale_a[0]);
    ind.a[1] = indicator(x2, cfg.set_a, scale_a[1]);
    ind.b[0] = indicator(x1, cfg.set_b, scale_b[0]);
    ind.b[1] = indicator(x2, cfg.set_b, scale_b[1]);
    for (int i = 0; i < 2; ++i)
        ind.denom[i] = std::accumulate(ind.a[i].begin(), ind.a[i].end(), 0L);
    return ind;
}

// Numerator counts for lags 0..max_lag given (possibly permuted) indicators.
std::vector<LagCounts> count_joint(const Indicators& ind, int max_lag, int from_lag = 0) {
    const size_t n = ind.a[0].size();
    std::vector<LagCounts> num(static_cast<size_t>(max_lag) + 1);
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            const unsigned char* ai = ind.a[i].data();
            const unsigned char* bj = ind.b[j].data();
            for (int h = from_lag; h <= max_lag; ++h) {
                long c = 0;
                const size_t limit = n - static_cast<size_t>(h);
                for (size_t t = 0; t < limit; ++t) c += ai[t] & bj[t + static_cast<size_t>(h)];
                num[static_cast<size_t>(h)].v[i][j] = c;
            }
        }
    }
    return num;
}

void require_denominators(const std::array<long, 2>& denom) {
    for (int i = 0; i < 2; ++i)
        if (denom[i] == 0)
            throw ZeroDenominator("sample_extremogram: no exceedances in conditioning component " +
                                  std::to_string(i + 1));
}

}  // namespace

ExtremogramResult sample_extremogram_with_scales(std::span<const double> x1,
                                                 std::span<const double> x2,
                                                 const ExtremogramConfig& cfg,
                                                 const std::array<double, 2>& scale_a,
                                                 const std::array<double, 2>& scale_b) {
    cfg.validate();
    if (x1.size() != x2.size()) throw std::invalid_argument("sample_extremogram: column size mismatch");
    if (x1.size() <= static_cast<size_t>(cfg.max_lag))
        throw std::invalid_argument("sample_extremogram: need n > max_lag");

    const Indicators ind = build_indicators(x1, x2, cfg, scale_a, scale_b);
    require_denominators(ind.denom);

    ExtremogramResult res;
    res.scale_a = scale_a;
    res.scale_b = scale_b;
    res.denom = ind.denom;
    res.exceed_counts = ind.denom;
    res.low_count_warning = ind.denom[0] < 20 || ind.denom[1] < 20;
    res.num = count_joint(ind, cfg.max_lag);
    res.rho.resize(res.num.size());
    for (size_t h = 0; h < res.num.size(); ++h)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                res.rho[h].v[i][j] = static_cast<double>(res.num[h].v[i][j]) /
                                     static_cast<double>(res.denom[i]);
    return res;
}

ExtremogramResult sample_extremogram(std::span<const double> x1, std::span<const double> x2,
                                     const ExtremogramConfig& cfg) {
    cfg.validate();
    const std::array<double, 2> scale_a{tail_scale(x1, cfg.set_a, cfg.m),
                                        tail_scale(x2, cfg.set_a, cfg.m)};
    const std::array<double, 2> scale_b{tail_scale(x1, cfg.set_b, cfg.m),
                                        tail_scale(x2, cfg.set_b, cfg.m)};
    return sample_extremogram_with_scales(x1, x2, cfg, scale_a, scale_b);
}

LagPanel permutation_bands(std::span<const double> x1, std::span<const double> x2,
                           const ExtremogramConfig& cfg, int n_perm, double band_quantile,
                           std::uint64_t seed) {
    cfg.validate();
    if (n_perm < 2) throw std::invalid_argument("permutation_bands: n_perm must be >= 2");
    if (!(band_quantile > 0.0 && band_quantile < 1.0))
        throw std::invalid_argument("permutation_bands: band_quantile must lie in (0, 1)");
    if (x1.size() != x2.size()) throw std::invalid_argument("permutation_bands: size mismatch");
    const size_t n = x1.size();
    if (n <= static_cast<size_t>(cfg.max_lag))
        throw std::invalid_argument("permutation_bands: need n > max_lag");

    const std::array<double, 2> scale_a{tail_scale(x1, cfg.set_a, cfg.m),
                                        tail_scale(x2, cfg.set_a, cfg.m)};
    const std::array<double, 2> scale_b{tail_scale(x1, cfg.set_b, cfg.m),
                                        tail_scale(x2, cfg.set_b, cfg.m)};
    const Indicators base = build_indicators(x1, x2, cfg, scale_a, scale_b);
    require_denominators(base.denom);

    // rho values per permutation, panel and lag 1..max_lag.
    const int lags = cfg.max_lag;
    std::vector<double> values(static_cast<size_t>(n_perm) * 4 * static_cast<size_t>(lags));
    auto slot = [&](int p, int i, int j, int h) -> double& {
        return values[((static_cast<size_t>(p) * 2 + static_cast<size_t>(i)) * 2 +
                       static_cast<size_t>(j)) *
                          static_cast<size_t>(lags) +
                      static_cast<size_t>(h - 1)];
    };

    auto run_perm = [&](int p) {
        Rng rng(Rng::derive(seed, static_cast<std::uint64_t>(p)));
        std::vector<std::uint32_t> perm(n);
        std::iota(perm.begin(), perm.end(), 0u);
        for (size_t t = n - 1; t > 0; --t) {
            const size_t u = static_cast<size_t>(rng.below(t + 1));
            std::swap(perm[t], perm[u]);
        }
        Indicators shuffled;
        shuffled.denom = base.denom;
        for (int i = 0; i < 2; ++i) {
            shuffled.a[i].resize(n);
            shuffled.b[i].resize(n);
            for (size_t t = 0; t < n; ++t) {
                shuffled.a[i][t] = base.a[i][perm[t]];
                shuffled.b[i][t] = base.b[i][perm[t]];
            }
        }
        const std::vector<LagCounts> num = count_joint(shuffled, lags, 1);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int h = 1; h <= lags; ++h)
                    slot(p, i, j, h) = static_cast<double>(num[static_cast<size_t>(h)].v[i][j]) /
                                       static_cast<double>(base.denom[i]);
    };

    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (hw > 1 && n_perm >= 8 && n >= 4096) {
        std::vector<std::thread> pool;
        std::atomic<int> cursor{0};
        for (unsigned w = 0; w < hw; ++w)
            pool.emplace_back([&] {
                for (int p = cursor.fetch_add(1); p < n_perm; p = cursor.fetch_add(1)) run_perm(p);
            });
        for (auto& th : pool) th.join();
    } else {
        for (int p = 0; p < n_perm; ++p) run_perm(p);
    }

    LagPanel band;
    std::vector<double> lag_values(static_cast<size_t>(n_perm));
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            double level = 0.0;
            for (int h = 1; h <= lags; ++h) {
                for (int p = 0; p < n_perm; ++p) lag_values[static_cast<size_t>(p)] = slot(p, i, j, h);
                level = std::max(level, empirical_quantile(lag_values, band_quantile));
            }
            band.v[i][j] = level;
        }
    return band;
}

std::vector<double> quantile_transform(std::span<const double> x, double target_df) {
    if (!(target_df > 0.0)) throw std::invalid_argument("quantile_transform: target_df must be > 0");
    if (x.empty()) throw EmptySeries("quantile_transform: empty input");
    const size_t n = x.size();
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) { return x[a] < x[b]; });

    // Average ranks on ties, 1-based.
    std::vector<double> rank(n);
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        while (j + 1 < n && x[order[j + 1]] == x[order[i]]) ++j;
        const double avg = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
        for (size_t k = i; k <= j; ++k) rank[order[k]] = avg;
        i = j + 1;
    }
    std::vector<double> out(n);
    for (size_t t = 0; t < n; ++t)
        out[t] = student_t_quantile(rank[t] / (static_cast<double>(n) + 1.0), target_df);
    return out;
}

std::vector<LagPanel> sample_ccf(std::span<const double> x1, std::span<const double> x2,
                                 int max_lag) {
    if (x1.size() != x2.size()) throw std::invalid_argument("sample_ccf: size mismatch");
    const size_t n = x1.size();
    if (n <= static_cast<size_t>(max_lag)) throw std::invalid_argument("sample_ccf: need n > max_lag");

    const std::span<const double> cols[2] = {x1, x2};
    double mean[2], sd[2];
    for (int i = 0; i < 2; ++i) {
        mean[i] = mean_of(cols[i]);
        double s = 0.0;
        for (double v : cols[i]) s += (v - mean[i]) * (v - mean[i]);
        sd[i] = std::sqrt(s / static_cast<double>(n));
        if (!(sd[i] > 0.0))
            throw ZeroVariance("sample_ccf: component " + std::to_string(i + 1) +
                               " has zero variance");
    }
    std::vector<LagPanel> out(static_cast<size_t>(max_lag) + 1);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int h = 0; h <= max_lag; ++h) {
                double s = 0.0;
                for (size_t t = 0; t + static_cast<size_t>(h) < n; ++t)
                    s += (cols[i][t] - mean[i]) * (cols[j][t + static_cast<size_t>(h)] - mean[j]);
                out[static_cast<size_t>(h)].v[i][j] = s / (static_cast<double>(n) * sd[i] * sd[j]);
            }
    return out;
}

std::vector<std::vector<long>> exceedance_clock_profile(
    const std::vector<std::vector<double>>& columns, int period, double q) {
    if (period < 1) throw std::invalid_argument("exceedance_clock_profile: period must be >= 1");
    if (!(q > 0.0 && q < 1.0))
        throw std::invalid_argument("exceedance_clock_profile: q must lie in (0, 1)");
    std::vector<std::vector<long>> profiles;
    profiles.reserve(columns.size());
    for (const auto& col : columns) {
        const double thr = empirical_quantile(col, q);
        std::vector<long> counts(static_cast<size_t>(period), 0);
        for (size_t t = 0; t < col.size(); ++t)
            if (col[t] > thr) ++counts[t % static_cast<size_t>(period)];
        profiles.push_back(std::move(counts));
    }
    return profiles;
}

}  // namespace extremo
