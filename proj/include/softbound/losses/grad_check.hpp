#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "softbound/error.hpp"

namespace softbound::losses {

struct GradCheckResult {
    double max_relative_error = 0.0;
    std::size_t worst_coordinate = 0;
    std::vector<double> numeric;
};

/// Compares `analytic` with central differences of `f` at `point`.
/// Relative error per coordinate is |a - n| / max(|a|, |n|, 1e-8).
inline GradCheckResult grad_check(const std::function<double(std::span<const double>)>& f,
                                  std::span<const double> point, std::span<const double> analytic, double h) {
    if (!(h > 0.0)) throw InvariantError("grad_check: step must be positive");
    if (analytic.size() != point.size()) throw DimensionError("grad_check: gradient length differs from point");
    std::vector<double> x(point.begin(), point.end());
    GradCheckResult r;
    r.numeric.resize(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double orig = x[k];
        x[k] = orig + h;
        const double up = f(x);
        x[k] = orig - h;
        const double down = f(x);
        x[k] = orig;
        if (!std::isfinite(up) || !std::isfinite(down))
            throw Error("grad_check: non-finite evaluation at coordinate " + std::to_string(k));
        const double n = (up - down) / (2.0 * h);
        r.numeric[k] = n;
        const double rel = std::abs(analytic[k] - n) / std::max({std::abs(analytic[k]), std::abs(n), 1e-8});
        if (rel > r.max_relative_error) {
            r.max_relative_error = rel;
            r.worst_coordinate = k;
        }
    }
    return r;
}

}  // namespace softbound::losses
