#include <doctest.h>

#include <cmath>

#include "extremo/model.hpp"
#include "test_util.hpp"

using namespace extremo;

namespace {

BivariateGarchParams diagonal_params(double a, double b) {
    BivariateGarchParams p;
    p.a0 = {1e-6, 1e-6};
    p.alpha = {a, 0.0, 0.0, a};
    p.beta = {b, 0.0, 0.0, b};
    return p;
}

// QMLE estimates reported for the foreign-exchange pair in the source study.
BivariateGarchParams fx_like_params() {
    BivariateGarchParams p;
    p.a0 = {1e-6, 1e-6};
    p.alpha = {0.214, 0.013, 0.110, 0.223};
    p.beta = {0.697, 0.008, 0.280, 0.663};
    return p;
}

BivariateGarchParams lower_triangular_params() {  // alpha/beta pattern with feedback 2 <- 1
    BivariateGarchParams p;
    p.a0 = {1e-6, 1e-6};
    p.alpha = {0.2, 0.0, 0.07, 0.1};
    p.beta = {0.7, 0.0, 0.02, 0.5};
    return p;
}

}  // namespace

TEST_CASE("spectral radius closed form on worked cases") {
    CHECK(spectral_radius_check(diagonal_params(0.1, 0.8)).spectral_radius ==
          doctest::Approx(0.9).epsilon(1e-14));
    CHECK(spectral_radius_check(diagonal_params(0.1, 0.8)).sufficient_condition_met);

    BivariateGarchParams p = diagonal_params(0.0, 0.0);
    p.alpha = {0.9, 0.05, 0.05, 0.9};  // a_ij totals
    CHECK(spectral_radius_check(p).spectral_radius == doctest::Approx(0.95).epsilon(1e-14));

    const StationarityReport fx = spectral_radius_check(fx_like_params());
    CHECK(fx.sufficient_condition_met);
    const Mat2 a = mean_transition(fx_like_params());
    const double oracle =
        testutil::dominant_eigenvalue_bruteforce(a(0, 0), a(0, 1), a(1, 0), a(1, 1));
    CHECK(fx.spectral_radius == doctest::Approx(oracle).epsilon(1e-13));

    const StationarityReport tri = spectral_radius_check(lower_triangular_params());
    CHECK(tri.spectral_radius == doctest::Approx(0.9).epsilon(1e-12));
}

TEST_CASE("spectral radius agrees with characteristic-polynomial roots on random sets") {
    Rng rng(31415);
    for (int k = 0; k < 1000; ++k) {
        BivariateGarchParams p;
        p.a0 = {1.0, 1.0};
        p.alpha = {rng.uniform01(), rng.uniform01(), rng.uniform01(), rng.uniform01()};
        p.beta = {rng.uniform01(), rng.uniform01(), rng.uniform01(), rng.uniform01()};
        const Mat2 a = mean_transition(p);
        const double brute =
            testutil::dominant_eigenvalue_bruteforce(a(0, 0), a(0, 1), a(1, 0), a(1, 1));
        CHECK(std::fabs(spectral_radius_check(p).spectral_radius - brute) < 1e-12);
    }
}

TEST_CASE("spectral radius weakly increases in each beta entry") {
    Rng rng(8);
    for (int k = 0; k < 300; ++k) {
        BivariateGarchParams p;
        p.a0 = {1.0, 1.0};
        p.alpha = {0.3 * rng.uniform01(), 0.3 * rng.uniform01(), 0.3 * rng.uniform01(),
                   0.3 * rng.uniform01()};
        p.beta = {0.5 * rng.uniform01(), 0.5 * rng.uniform01(), 0.5 * rng.uniform01(),
                  0.5 * rng.uniform01()};
        const double base = spectral_radius_check(p).spectral_radius;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                BivariateGarchParams q = p;
                q.beta(i, j) += 0.05;
                CHECK(spectral_radius_check(q).spectral_radius >= base - 1e-14);
            }
    }
}

TEST_CASE("simulate_univariate basics") {
    SUBCASE("degenerate recursion gives constant volatility") {
        const SimulatedPath path = simulate_univariate({4.0, 0.0, 0.0}, std::nullopt, 500, 10, 7);
        for (double s : path.sigma[0]) CHECK(s == doctest::Approx(2.0).epsilon(1e-15));
        for (size_t t = 0; t < path.size(); ++t)
            CHECK(path.x[0][t] == path.sigma[0][t] * path.z[0][t]);
    }

    SUBCASE("stationary variance matches a0 / (1 - a1 - b1)") {
        const SimulatedPath path =
            simulate_univariate({1e-6, 0.1, 0.8}, std::nullopt, 50000, 1000, 99);
        const double var = variance_of(path.x[0]);
        CHECK(var == doctest::Approx(1e-5).epsilon(0.10));
    }

    SUBCASE("reported univariate t fit parameters imply a contracting mean recursion") {
        const SimulatedPath path = simulate_univariate({1e-6, 0.137, 0.831}, 9.81, 20000, 1000, 5);
        // E(a1 Z^2 + b1) = a1 + b1 = 0.968 < 1 ; the path stays finite and positive.
        Rng rng(17);
        double m = 0.0;
        const int n_mc = 200000;
        for (int i = 0; i < n_mc; ++i) {
            const double z = draw_standardized(rng, 9.81);
            m += 0.137 * z * z + 0.831;
        }
        CHECK(m / n_mc == doctest::Approx(0.968).epsilon(0.01));
        for (double w : path.w[0]) CHECK(w >= 1e-6);
    }

    SUBCASE("determinism and exact reconstruction") {
        const SimulatedPath a = simulate_univariate({1e-6, 0.1, 0.8}, 10.0, 4000, 100, 12345);
        const SimulatedPath b = simulate_univariate({1e-6, 0.1, 0.8}, 10.0, 4000, 100, 12345);
        REQUIRE(a.size() == b.size());
        for (size_t t = 0; t < a.size(); ++t) {
            CHECK(a.x[0][t] == b.x[0][t]);
            CHECK(a.x[0][t] / a.sigma[0][t] == a.z[0][t]);
            CHECK(a.sigma[0][t] * a.z[0][t] == a.x[0][t]);
        }
    }

    SUBCASE("rejects nonpositive a0") {
        CHECK_THROWS_AS(simulate_univariate({0.0, 0.1, 0.8}, std::nullopt, 10, 0, 1),
                        std::invalid_argument);
    }

    SUBCASE("explosive coefficient sums still simulate") {
        const SimulatedPath path = simulate_univariate({1e-6, 0.25, 0.8}, std::nullopt, 300, 0, 8);
        CHECK(path.size() == 300);
        for (double w : path.w[0]) {
            CHECK(w >= 1e-6);
            CHECK(std::isfinite(w));
        }
    }
}

TEST_CASE("simulate_bivariate basics") {
    SUBCASE("zero coefficient matrices reduce to correlated noise") {
        BivariateGarchParams p = diagonal_params(0.0, 0.0);
        p.a0 = {4.0, 9.0};
        Innovation innov;
        innov.rho = 0.6;
        const SimulatedPath path = simulate_bivariate(p, innov, 30000, 100, 11);
        for (size_t t = 0; t < path.size(); ++t) {
            CHECK(path.sigma[0][t] == doctest::Approx(2.0).epsilon(1e-15));
            CHECK(path.sigma[1][t] == doctest::Approx(3.0).epsilon(1e-15));
        }
        CHECK(correlation_of(path.x[0], path.x[1]) == doctest::Approx(0.6).epsilon(0.03));
    }

    SUBCASE("recovered innovations carry the innovation correlation") {
        Innovation innov;
        innov.rho = 0.7;
        const SimulatedPath path = simulate_bivariate(diagonal_params(0.1, 0.8), innov, 50000, 1000, 3);
        std::vector<double> r0(path.size()), r1(path.size());
        for (size_t t = 0; t < path.size(); ++t) {
            r0[t] = path.x[0][t] / path.sigma[0][t];
            CHECK(r0[t] == path.z[0][t]);
            r1[t] = path.x[1][t] / path.sigma[1][t];
        }
        // 4 standard errors of a correlation estimate at rho = .7
        const double se = (1.0 - 0.49) / std::sqrt(50000.0);
        CHECK(std::fabs(correlation_of(r0, r1) - 0.7) < 4.0 * se);
    }

    SUBCASE("asymmetric example parameters are stationary") {
        Innovation innov;
        innov.family = Innovation::Family::StudentT;
        innov.df = 10.0;
        innov.rho = 0.5;
        const SimulatedPath path = simulate_bivariate(lower_triangular_params(), innov, 5000, 500, 4);
        CHECK_FALSE(path.stationarity_warning);
        for (int i = 0; i < 2; ++i)
            for (double w : path.w[i]) CHECK(w >= 1e-6);
    }

    SUBCASE("explosive parameters flag but simulate") {
        BivariateGarchParams p = diagonal_params(0.3, 0.75);  // radius 1.05
        const SimulatedPath path = simulate_bivariate(p, Innovation{}, 200, 0, 1);
        CHECK(path.stationarity_warning);
        CHECK(path.size() == 200);
    }

    SUBCASE("bit-identical on repeated seeds") {
        Innovation innov;
        innov.rho = -0.4;
        const SimulatedPath a = simulate_bivariate(diagonal_params(0.1, 0.8), innov, 2000, 50, 777);
        const SimulatedPath b = simulate_bivariate(diagonal_params(0.1, 0.8), innov, 2000, 50, 777);
        for (int i = 0; i < 2; ++i)
            for (size_t t = 0; t < a.size(); ++t) {
                CHECK(a.x[i][t] == b.x[i][t]);
                CHECK(a.sigma[i][t] * a.z[i][t] == a.x[i][t]);
            }
    }
}

TEST_CASE("lyapunov exponent") {
    SUBCASE("deterministic diagonal case equals log beta") {
        BivariateGarchParams p = diagonal_params(0.0, 0.8);
        const LyapunovEstimate est = lyapunov_exponent(p, Innovation{}, 500, 3, 1);
        CHECK(est.estimate == doctest::Approx(std::log(0.8)).epsilon(1e-12));
    }

    SUBCASE("baseline diagonal model is contracting") {
        const LyapunovEstimate est =
            lyapunov_exponent(diagonal_params(0.1, 0.8), Innovation{}, 20000, 10, 2);
        CHECK(est.estimate < 0.0);
        CHECK(est.estimate + 3.0 * est.standard_error < 0.0);
    }

    SUBCASE("scalar embedding matches E log Z^2") {
        // alpha = I, beta = 0: gamma = E log Z^2 = -(log 2 + euler_gamma).
        BivariateGarchParams p = diagonal_params(1.0, 0.0);
        const LyapunovEstimate est = lyapunov_exponent(p, Innovation{}, 200000, 12, 42);
        const double truth = -(std::log(2.0) + 0.57721566490153286);
        CHECK(std::fabs(est.estimate - truth) < 3.0 * est.standard_error + 0.02);
    }

    SUBCASE("diagonal parameters match the dominant scalar mean, MC oracle") {
        BivariateGarchParams p;
        p.a0 = {1e-6, 1e-6};
        p.alpha = {0.1, 0.0, 0.0, 0.05};
        p.beta = {0.8, 0.0, 0.0, 0.6};
        const LyapunovEstimate est = lyapunov_exponent(p, Innovation{}, 50000, 10, 5);
        Rng rng(1009);
        std::vector<double> l0, l1;
        for (int i = 0; i < 400000; ++i) {
            const double z = rng.normal();
            l0.push_back(std::log(0.1 * z * z + 0.8));
            l1.push_back(std::log(0.05 * z * z + 0.6));
        }
        const double oracle = std::max(mean_of(l0), mean_of(l1));
        const double combined =
            std::sqrt(est.standard_error * est.standard_error + se_of(l0) * se_of(l0));
        CHECK(std::fabs(est.estimate - oracle) < 3.0 * combined + 1e-3);
    }

    SUBCASE("input validation") {
        CHECK_THROWS_AS(lyapunov_exponent(diagonal_params(0.1, 0.8), Innovation{}, 0, 1, 1),
                        std::invalid_argument);
        CHECK_THROWS_AS(lyapunov_exponent(diagonal_params(0.1, 0.8), Innovation{}, 100, 0, 1),
                        std::invalid_argument);
    }
}

TEST_CASE("growth condition check") {
    SUBCASE("all-ones beta matrix gives 2^p exactly") {
        BivariateGarchParams p;
        p.a0 = {1.0, 1.0};
        p.alpha = {0.0, 0.0, 0.0, 0.0};
        p.beta = {1.0, 1.0, 1.0, 1.0};
        for (double pw : {0.5, 1.0, 3.0}) {
            const GrowthConditionReport rep = check_growth_condition(p, Innovation{}, pw, 20000, 1);
            CHECK(rep.lhs_estimate == doctest::Approx(std::pow(2.0, pw)).epsilon(1e-12));
            CHECK(rep.satisfied);
        }
    }

    SUBCASE("symmetric cross example at p = 1 against the closed-form oracle") {
        BivariateGarchParams p;
        p.a0 = {1e-6, 1e-6};
        p.alpha = {0.1, 0.02, 0.02, 0.1};
        p.beta = {0.8, 0.04, 0.04, 0.8};
        const GrowthConditionReport rep = check_growth_condition(p, Innovation{}, 1.0, 1000000, 3);
        // min row = .84 + .02(Z1^2+Z2^2) + .08 min(Z1^2, Z2^2); E min(chi2_1, chi2_1) = 1 - 2/pi.
        const double oracle = 0.88 + 0.08 * (1.0 - 2.0 / 3.14159265358979323846);
        CHECK(rep.lhs_estimate == doctest::Approx(oracle).epsilon(0.01));
        CHECK_FALSE(rep.satisfied);  // below sqrt(2)
    }

    SUBCASE("tiny diagonal alpha fails the condition") {
        BivariateGarchParams p;
        p.a0 = {1.0, 1.0};
        p.alpha = {0.01, 0.0, 0.0, 0.01};
        p.beta = {0.0, 0.0, 0.0, 0.0};
        const GrowthConditionReport rep = check_growth_condition(p, Innovation{}, 1.0, 200000, 9);
        CHECK(rep.lhs_estimate == doctest::Approx(0.01 * (1.0 - 2.0 / 3.141592653589793)).epsilon(0.05));
        CHECK_FALSE(rep.satisfied);
    }

    SUBCASE("rejects bad arguments") {
        CHECK_THROWS_AS(check_growth_condition(diagonal_params(0.1, 0.8), Innovation{}, 0.0, 100, 1),
                        std::invalid_argument);
        Innovation t5;
        t5.family = Innovation::Family::StudentT;
        t5.df = 5.0;
        CHECK_THROWS_AS(check_growth_condition(diagonal_params(0.1, 0.8), t5, 2.5, 100, 1),
                        std::invalid_argument);
    }
}
