#pragma once

#include <functional>
#include <span>
#include <vector>

namespace extremo {

struct NelderMeadOptions {
    int max_iter = 4000;      // simplex iterations per run
    double f_tol = 1e-10;     // relative spread of simplex values
    double x_tol = 1e-9;      // simplex diameter
    double step = 0.25;       // initial per-coordinate displacement
};

struct NelderMeadResult {
    std::vector<double> x;
    double f = 0.0;
    int iterations = 0;
    long evaluations = 0;
    bool converged = false;
};

/// Derivative-free simplex minimizer (reflection 1, expansion 2, contraction
/// 0.5, shrink 0.5). The best vertex never worsens, so the returned value is
/// the best point evaluated.
NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                             std::span<const double> x0, const NelderMeadOptions& opts = {});

}  // namespace extremo
