#include "adjg/payoff.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace adjg {

Payoff call_payoff(double strike) {
    return {"call",
            [strike](std::span<const double> x) { return std::max(x[0] - strike, 0.0); },
            [strike](std::span<const double> x) {
                return std::vector<double>{x[0] > strike ? 1.0 : 0.0};
            }};
}

Payoff put_payoff(double strike) {
    return {"put",
            [strike](std::span<const double> x) { return std::max(strike - x[0], 0.0); },
            [strike](std::span<const double> x) {
                return std::vector<double>{x[0] < strike ? -1.0 : 0.0};
            }};
}

Payoff basket_call_payoff(std::vector<double> weights, double strike) {
    auto basket = [weights](std::span<const double> x) {
        double s = 0.0;
        for (std::size_t i = 0; i < weights.size(); ++i) s += weights[i] * x[i];
        return s;
    };
    return {"basket-call",
            [basket, strike](std::span<const double> x) { return std::max(basket(x) - strike, 0.0); },
            [basket, weights, strike](std::span<const double> x) {
                std::vector<double> g(weights.size(), 0.0);
                if (basket(x) > strike) g = weights;
                return g;
            }};
}

Payoff basket_sum_payoff(std::vector<double> weights) {
    return {"sum",
            [weights](std::span<const double> x) {
                double s = 0.0;
                for (std::size_t i = 0; i < weights.size(); ++i) s += weights[i] * x[i];
                return s;
            },
            [weights](std::span<const double>) { return weights; }};
}

// (shift + sum w_i x_i)^power, smooth wherever the shifted basket stays positive.
Payoff smooth_power_payoff(std::vector<double> weights, double power, double shift) {
    auto basket = [weights, shift](std::span<const double> x) {
        double s = shift;
        for (std::size_t i = 0; i < weights.size(); ++i) s += weights[i] * x[i];
        return s;
    };
    return {"smooth-power",
            [basket, power](std::span<const double> x) { return std::pow(basket(x), power); },
            [basket, weights, power](std::span<const double> x) {
                const double scale = power * std::pow(basket(x), power - 1.0);
                std::vector<double> g(weights.size());
                for (std::size_t i = 0; i < weights.size(); ++i) g[i] = scale * weights[i];
                return g;
            }};
}

Payoff min_of_payoff(int n) {
    if (n < 1) throw std::invalid_argument("min_of_payoff: need at least one component");
    return {"min-of",
            [n](std::span<const double> x) {
                double m = x[0];
                for (int i = 1; i < n; ++i) m = std::min(m, x[i]);
                return m;
            },
            [n](std::span<const double> x) {
                int arg = 0;
                for (int i = 1; i < n; ++i)
                    if (x[i] < x[arg]) arg = i;
                std::vector<double> g(n, 0.0);
                g[arg] = 1.0;
                return g;
            }};
}

}  // namespace adjg
