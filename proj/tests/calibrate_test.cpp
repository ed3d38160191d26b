#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "adjg/calibrate.hpp"
#include "adjg/payoff.hpp"
#include "adjg/verify.hpp"

using namespace adjg;

namespace {

double rel_diff(double a, double b) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-10});
}

// One-call GBM vol problem with the market generated by the model itself at
// the true parameter, under common random numbers.
calib::CalibrationProblem vol_problem(double nu_true, double nu_start, long n_paths, int steps) {
    calib::CalibrationProblem p;
    p.model = mc::make_gbm_1d_fixed_drift(0.05, nu_true);
    p.x0 = {100.0};
    p.n_paths = n_paths;
    p.seed = 7777;

    calib::Instrument inst;
    inst.payoff = call_payoff(100.0);
    inst.grid = mc::uniform_grid(1.0, steps);
    inst.market_price = mc::mc_greeks(*p.model, p.x0, inst.payoff, inst.grid, n_paths, p.seed).price;
    p.instruments.push_back(std::move(inst));

    p.theta0 = {nu_start};
    p.lo = {0.01};
    p.hi = {1.5};
    return p;
}

}  // namespace

TEST_CASE("cost vanishes at the synthetic optimum and is a plain residual square") {
    calib::CalibrationProblem p = vol_problem(0.2, 0.2, 2000, 8);
    CHECK(calib::calib_cost(p, std::vector<double>{0.2}) == 0.0);

    // single instrument: (price - market)^2 by hand
    const double market = p.instruments[0].market_price;
    p.model->set_params(std::vector<double>{0.3});
    const double price = mc::mc_greeks(*p.model, p.x0, p.instruments[0].payoff,
                                       p.instruments[0].grid, p.n_paths, p.seed)
                             .price;
    CHECK(calib::calib_cost(p, std::vector<double>{0.3}) ==
          doctest::Approx((price - market) * (price - market)).epsilon(1e-15));
}

TEST_CASE("two identical instruments double the cost and the gradient") {
    calib::CalibrationProblem p1 = vol_problem(0.2, 0.3, 1000, 8);
    calib::CalibrationProblem p2 = vol_problem(0.2, 0.3, 1000, 8);
    p2.instruments.push_back(p2.instruments[0]);

    const std::vector<double> theta{0.3};
    const double c1 = calib::calib_cost(p1, theta);
    const double c2 = calib::calib_cost(p2, theta);
    CHECK(rel_diff(c2, 2.0 * c1) < 1e-14);
    const std::vector<double> g1 = calib::calib_gradient(p1, theta);
    const std::vector<double> g2 = calib::calib_gradient(p2, theta);
    CHECK(rel_diff(g2[0], 2.0 * g1[0]) < 1e-14);
}

TEST_CASE("common random numbers make the cost deterministic") {
    calib::CalibrationProblem p = vol_problem(0.2, 0.3, 3000, 8);
    const std::vector<double> theta{0.27};
    const double a = calib::calib_cost(p, theta);
    const double b = calib::calib_cost(p, theta);
    CHECK(a == b);
}

TEST_CASE("gradient vanishes at the synthetic optimum") {
    calib::CalibrationProblem p = vol_problem(0.2, 0.2, 2000, 8);
    const std::vector<double> g = calib::calib_gradient(p, std::vector<double>{0.2});
    CHECK(std::abs(g[0]) < 1e-10);
}

TEST_CASE("gradient matches finite differences of the deterministic cost") {
    calib::CalibrationProblem p = vol_problem(0.2, 0.3, 3000, 8);
    const std::vector<double> theta{0.3};
    const std::vector<double> g = calib::calib_gradient(p, theta);
    const std::vector<double> fd = verify::fd_gradient(
        [&](std::span<const double> th) { return calib::calib_cost(p, th); }, theta, 1e-6);
    CHECK(rel_diff(g[0], fd[0]) < 1e-5);
}

TEST_CASE("theta outside the bounds is a precondition error") {
    calib::CalibrationProblem p = vol_problem(0.2, 0.3, 500, 4);
    CHECK_THROWS_AS(calib::calib_cost(p, std::vector<double>{2.0}), std::invalid_argument);
    CHECK_THROWS_AS(calib::calib_gradient(p, std::vector<double>{0.0}), std::invalid_argument);

    p.theta0 = {5.0};  // infeasible start
    CHECK_THROWS_AS(calib::calibrate(p, 10, 1e-8), std::invalid_argument);

    calib::CalibrationProblem bad = vol_problem(0.2, 0.3, 500, 4);
    bad.lo = {1.0};
    bad.hi = {0.5};
    CHECK_THROWS_AS(calib::calibrate(bad, 10, 1e-8), std::invalid_argument);
}

TEST_CASE("starting at the optimum converges immediately") {
    calib::CalibrationProblem p = vol_problem(0.2, 0.2, 1000, 8);
    const calib::CalibrationResult res = calib::calibrate(p, 20, 1e-8);
    CHECK(res.converged);
    CHECK(res.iterations <= 1);
    CHECK(res.theta_star[0] == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("synthetic vol recovery from a wrong start") {
    calib::CalibrationProblem p = vol_problem(0.2, 0.3, 4000, 16);
    const calib::CalibrationResult res = calib::calibrate(p, 50, 1e-9);
    CHECK(res.converged);
    CHECK(std::abs(res.theta_star[0] - 0.2) < 1e-3);
    // accepted iterates never increase the cost
    for (std::size_t i = 1; i < res.cost_history.size(); ++i) {
        CHECK(res.cost_history[i] <= res.cost_history[i - 1]);
    }
    CHECK(res.cost_history.size() == res.grad_norm_history.size());
}

TEST_CASE("projection keeps iterates inside the box") {
    calib::CalibrationProblem p = vol_problem(0.2, 0.3, 1000, 8);
    p.lo = {0.25};  // the optimum sits outside; expect convergence onto the bound
    const calib::CalibrationResult res = calib::calibrate(p, 50, 1e-9);
    CHECK(res.theta_star[0] >= 0.25);
    CHECK(res.theta_star[0] == doctest::Approx(0.25).epsilon(1e-10));
}
