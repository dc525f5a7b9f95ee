#include "extremo/optim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace extremo {

NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                             std::span<const double> x0, const NelderMeadOptions& opts) {
    const size_t d = x0.size();
    const size_t m = d + 1;
    long evals = 0;
    auto eval = [&](const std::vector<double>& x) {
        ++evals;
        const double v = f(x);
        return std::isfinite(v) ? v : std::numeric_limits<double>::max();
    };

    std::vector<std::vector<double>> simplex(m, std::vector<double>(x0.begin(), x0.end()));
    std::vector<double> fv(m);
    for (size_t i = 1; i < m; ++i) simplex[i][i - 1] += opts.step;
    for (size_t i = 0; i < m; ++i) fv[i] = eval(simplex[i]);

    std::vector<size_t> order(m);
    std::vector<double> centroid(d), xr(d), xe(d), xc(d);
    NelderMeadResult result;
    int iter = 0;
    for (; iter < opts.max_iter; ++iter) {
        std::iota(order.begin(), order.end(), size_t{0});
        std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return fv[a] < fv[b]; });
        const size_t best = order[0], worst = order[m - 1], second_worst = order[m - 2];

        const double spread = std::fabs(fv[worst] - fv[best]);
        double diameter = 0.0;
        for (size_t i = 0; i < m; ++i)
            for (size_t k = 0; k < d; ++k)
                diameter = std::max(diameter, std::fabs(simplex[i][k] - simplex[best][k]));
        if (spread <= opts.f_tol * (std::fabs(fv[best]) + opts.f_tol) && diameter <= opts.x_tol) {
            result.converged = true;
            break;
        }

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (size_t i = 0; i < m; ++i) {
            if (i == worst) continue;
            for (size_t k = 0; k < d; ++k) centroid[k] += simplex[i][k];
        }
        for (size_t k = 0; k < d; ++k) centroid[k] /= static_cast<double>(d);

        for (size_t k = 0; k < d; ++k) xr[k] = centroid[k] + (centroid[k] - simplex[worst][k]);
        const double fr = eval(xr);
        if (fr < fv[best]) {
            for (size_t k = 0; k < d; ++k) xe[k] = centroid[k] + 2.0 * (centroid[k] - simplex[worst][k]);
            const double fe = eval(xe);
            if (fe < fr) {
                simplex[worst] = xe;
                fv[worst] = fe;
            } else {
                simplex[worst] = xr;
                fv[worst] = fr;
            }
        } else if (fr < fv[second_worst]) {
            simplex[worst] = xr;
            fv[worst] = fr;
        } else {
            const bool outside = fr < fv[worst];
            if (outside)
                for (size_t k = 0; k < d; ++k) xc[k] = centroid[k] + 0.5 * (xr[k] - centroid[k]);
            else
                for (size_t k = 0; k < d; ++k)
                    xc[k] = centroid[k] + 0.5 * (simplex[worst][k] - centroid[k]);
            const double fc = eval(xc);
            if (fc < std::min(fr, fv[worst])) {
                simplex[worst] = xc;
                fv[worst] = fc;
            } else {
                for (size_t i = 0; i < m; ++i) {
                    if (i == best) continue;
                    for (size_t k = 0; k < d; ++k)
                        simplex[i][k] = simplex[best][k] + 0.5 * (simplex[i][k] - simplex[best][k]);
                    fv[i] = eval(simplex[i]);
                }
            }
        }
    }

    const size_t best = static_cast<size_t>(
        std::min_element(fv.begin(), fv.end()) - fv.begin());
    result.x = simplex[best];
    result.f = fv[best];
    result.iterations = iter;
    result.evaluations = evals;
    return result;
}

}  // namespace extremo
