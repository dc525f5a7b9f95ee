#include "extremo/common.hpp"

#include <algorithm>

namespace extremo {

double empirical_quantile(std::span<const double> v, double q) {
    if (v.empty()) throw EmptySeries("empirical_quantile: empty input");
    std::vector<double> s(v.begin(), v.end());
    std::sort(s.begin(), s.end());
    const auto n = static_cast<double>(s.size());
    // Tolerant ceil: q*n that is an integer up to 1-ulp noise keeps its rank.
    auto rank = static_cast<long>(std::ceil(q * n - 1e-9));
    rank = std::clamp<long>(rank, 1, static_cast<long>(s.size()));
    return s[static_cast<size_t>(rank - 1)];
}

bool exact_reconstruction_pair(double x, double& sigma, double& z, long* repairs) {
    z = x / sigma;
    if (sigma * z == x) return true;

    // Moving the quotient never helps (the product lattice of this sigma skips
    // x entirely); sweep sigma by ulps instead, recomputing the quotient.
    double up = sigma, dn = sigma;
    for (int k = 1; k <= 4096; ++k) {
        up = std::nextafter(up, std::numeric_limits<double>::infinity());
        double zc = x / up;
        if (up * zc == x) {
            sigma = up;
            z = zc;
            if (repairs) ++*repairs;
            return true;
        }
        dn = std::nextafter(dn, 0.0);
        zc = x / dn;
        if (dn * zc == x) {
            sigma = dn;
            z = zc;
            if (repairs) ++*repairs;
            return true;
        }
    }
    z = x / sigma;
    return false;
}

}  // namespace extremo
