#pragma once

#include <cmath>
#include <span>

namespace adjg {

struct MeanStdErr {
    double mean = 0.0;
    double std_error = 0.0;
};

// Mean and standard error of the mean. Deviations are taken against the first
// element so that constant samples give an exact zero standard error.
inline MeanStdErr mean_stderr(std::span<const double> xs) {
    const std::size_t n = xs.size();
    if (n == 0) return {};
    const double shift = xs[0];
    double acc = 0.0;
    for (double x : xs) acc += x - shift;
    const double mean_dev = acc / static_cast<double>(n);
    if (n < 2) return {shift + mean_dev, 0.0};
    double ss = 0.0;
    for (double x : xs) {
        const double d = (x - shift) - mean_dev;
        ss += d * d;
    }
    const double var = ss / static_cast<double>(n - 1);
    return {shift + mean_dev, std::sqrt(var / static_cast<double>(n))};
}

}  // namespace adjg
