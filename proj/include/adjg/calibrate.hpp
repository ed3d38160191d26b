#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "adjg/payoff.hpp"
#include "adjg/sde.hpp"

namespace adjg::calib {

struct Instrument {
    Payoff payoff;
    std::vector<double> grid;
    double market_price = 0.0;
};

// Least-squares fit of model parameters to instrument prices. All price and
// gradient evaluations reuse the one seed (common random numbers), so the
// Monte Carlo cost is a deterministic smooth function of theta.
struct CalibrationProblem {
    std::unique_ptr<mc::SdeModel> model;
    std::vector<double> x0;
    std::vector<Instrument> instruments;
    std::vector<double> theta0;
    std::vector<double> lo, hi;  // per-parameter bounds, lo < hi
    long n_paths = 0;
    std::uint64_t seed = 0;

    void validate() const;
};

struct CalibrationResult {
    std::vector<double> theta_star;
    std::vector<double> cost_history;       // accepted iterates, non-increasing
    std::vector<double> grad_norm_history;  // projected gradient norms
    int iterations = 0;
    bool converged = false;
};

double calib_cost(const CalibrationProblem& problem, std::span<const double> theta);

// dF/dtheta_k = sum_j 2 (price_j - market_j) dprice_j/dtheta_k, with the
// per-instrument price sensitivities from the backward path sweep averaged
// over the same fixed draws as the prices.
std::vector<double> calib_gradient(const CalibrationProblem& problem,
                                   std::span<const double> theta);

// Projected limited-memory quasi-Newton descent with a backtracking
// (halving) line search. Stops at grad_tol on the projected gradient, on a
// stalled step, or at max_iters.
CalibrationResult calibrate(const CalibrationProblem& problem, int max_iters, double grad_tol);

}  // namespace adjg::calib
