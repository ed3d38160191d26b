#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace adjg {

// Terminal payoff with its gradient. Lipschitz payoffs with kinks (calls,
// puts) are fine: the gradient is the almost-everywhere derivative, which is
// what pathwise differentiation needs. Discontinuous payoffs must not be
// wrapped in this type; the configuration layer rejects them.
struct Payoff {
    std::string name;
    std::function<double(std::span<const double>)> value;
    std::function<std::vector<double>(std::span<const double>)> gradient;
};

Payoff call_payoff(double strike);
Payoff put_payoff(double strike);
Payoff basket_call_payoff(std::vector<double> weights, double strike);
Payoff basket_sum_payoff(std::vector<double> weights);
Payoff smooth_power_payoff(std::vector<double> weights, double power, double shift);
Payoff min_of_payoff(int n);

}  // namespace adjg
