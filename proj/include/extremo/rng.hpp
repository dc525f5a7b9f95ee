#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>

#include "extremo/common.hpp"

namespace extremo {

/// Seeded random source with hand-rolled samplers. std::*_distribution is
/// implementation-defined, so every draw here is specified down to the bit:
/// identical seeds give identical streams on any conforming platform.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1].
    double uniform_pos() { return 1.0 - uniform01(); }

    /// Standard normal, Box-Muller with a cached spare.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform_pos();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    /// Gamma(shape, 1), Marsaglia-Tsang; shape < 1 via the boost identity.
    double gamma(double shape) {
        if (shape < 1.0) {
            const double u = uniform_pos();
            return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform_pos();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    double chi_square(double df) { return 2.0 * gamma(0.5 * df); }

    /// Uniform integer in [0, n), rejection sampled.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t r;
        do {
            r = eng_();
        } while (r >= limit);
        return r % n;
    }

    /// Deterministic per-stream seed derivation (splitmix64 finalizer).
    static std::uint64_t derive(std::uint64_t master, std::uint64_t stream) {
        std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (stream + 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

  private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

/// Innovation law: unit-variance, zero-mean pairs with correlation rho.
struct Innovation {
    enum class Family { Gaussian, StudentT };
    Family family = Family::Gaussian;
    double df = 0.0;  // used when family == StudentT; must be > 2
    double rho = 0.0;

    void validate() const {
        if (family == Family::StudentT && !(df > 2.0))
            throw std::invalid_argument("Innovation: Student-t needs df > 2");
        if (!(rho > -1.0 && rho < 1.0))
            throw std::invalid_argument("Innovation: rho must lie in (-1, 1)");
    }
};

struct ZPair {
    double z0, z1;
};

/// Draws standardized innovation pairs. Student-t pairs share one chi-square
/// mixing variable over a correlated Gaussian pair (a genuine bivariate t),
/// rescaled by sqrt((df-2)/df) so each component has unit variance; the pair
/// correlation stays equal to rho.
class InnovationSampler {
  public:
    InnovationSampler(const Innovation& spec, Rng& rng)
        : spec_(spec), rng_(rng), cross_(std::sqrt(1.0 - spec.rho * spec.rho)) {
        spec.validate();
    }

    ZPair draw() {
        const double g0 = rng_.normal();
        const double g1 = spec_.rho * g0 + cross_ * rng_.normal();
        if (spec_.family == Innovation::Family::Gaussian) return {g0, g1};
        const double scale = std::sqrt((spec_.df - 2.0) / rng_.chi_square(spec_.df));
        return {g0 * scale, g1 * scale};
    }

  private:
    Innovation spec_;
    Rng& rng_;
    double cross_;
};

/// Single standardized innovation: normal, or Student-t(df) scaled to unit
/// variance when innov_df is given.
inline double draw_standardized(Rng& rng, std::optional<double> innov_df) {
    const double g = rng.normal();
    if (!innov_df) return g;
    if (!(*innov_df > 2.0)) throw std::invalid_argument("innovation df must be > 2");
    return g * std::sqrt((*innov_df - 2.0) / rng.chi_square(*innov_df));
}

}  // namespace extremo
