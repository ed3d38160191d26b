#include "adjg/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

#include "adjg/linalg.hpp"

namespace adjg::calib {

void CalibrationProblem::validate() const {
    if (!model) throw std::invalid_argument("calibration: no model");
    const int p = model->n_params();
    if (instruments.empty()) throw std::invalid_argument("calibration: no instruments");
    if (x0.size() != static_cast<std::size_t>(model->dim())) {
        throw std::invalid_argument("calibration: x0 dimension mismatch");
    }
    if (theta0.size() != static_cast<std::size_t>(p) || lo.size() != theta0.size() ||
        hi.size() != theta0.size()) {
        throw std::invalid_argument("calibration: theta0/bounds length mismatch");
    }
    for (int i = 0; i < p; ++i) {
        if (!(lo[i] < hi[i])) throw std::invalid_argument("calibration: bounds need lo < hi");
        if (theta0[i] < lo[i] || theta0[i] > hi[i]) {
            throw std::invalid_argument("calibration: theta0 outside bounds at parameter " +
                                        std::to_string(i));
        }
    }
    if (n_paths < 1) throw std::invalid_argument("calibration: n_paths must be >= 1");
}

namespace {

void check_theta(const CalibrationProblem& problem, std::span<const double> theta) {
    if (theta.size() != problem.theta0.size()) {
        throw std::invalid_argument("calibration: theta length mismatch");
    }
    for (std::size_t i = 0; i < theta.size(); ++i) {
        if (theta[i] < problem.lo[i] || theta[i] > problem.hi[i]) {
            throw std::invalid_argument("calibration: theta outside bounds at parameter " +
                                        std::to_string(i));
        }
    }
}

struct CostAndGrad {
    double cost = 0.0;
    std::vector<double> grad;
};

// One pass over the instruments gives both the residual cost and its
// gradient; prices and parameter sensitivities come from the same seeded
// draws every call.
CostAndGrad eval_cost_grad(const CalibrationProblem& problem, std::span<const double> theta) {
    check_theta(problem, theta);
    problem.model->set_params(theta);
    CostAndGrad out;
    out.grad.assign(theta.size(), 0.0);
    for (const Instrument& inst : problem.instruments) {
        const mc::GreeksResult res = mc::mc_greeks(*problem.model, problem.x0, inst.payoff,
                                                   inst.grid, problem.n_paths, problem.seed);
        const double resid = res.price - inst.market_price;
        out.cost += resid * resid;
        for (std::size_t k = 0; k < theta.size(); ++k) {
            out.grad[k] += 2.0 * resid * res.param_sens[k];
        }
    }
    return out;
}

std::vector<double> project(const CalibrationProblem& problem, std::span<const double> x) {
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = std::clamp(x[i], problem.lo[i], problem.hi[i]);
    return out;
}

// Gradient components pointing out of an active bound do not count.
std::vector<double> projected_gradient(const CalibrationProblem& problem,
                                       std::span<const double> x, std::span<const double> g) {
    std::vector<double> pg(g.begin(), g.end());
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (x[i] <= problem.lo[i] && g[i] > 0.0) pg[i] = 0.0;
        if (x[i] >= problem.hi[i] && g[i] < 0.0) pg[i] = 0.0;
    }
    return pg;
}

double norm2(std::span<const double> v) { return std::sqrt(dot(v, v)); }

struct LbfgsMemory {
    std::deque<std::vector<double>> s, y;
    std::deque<double> rho;
    static constexpr std::size_t capacity = 8;

    void push(std::vector<double> si, std::vector<double> yi) {
        const double sy = dot(si, yi);
        if (sy <= 1e-10 * norm2(si) * norm2(yi)) return;  // skip non-curvature pairs
        s.push_back(std::move(si));
        y.push_back(std::move(yi));
        rho.push_back(1.0 / sy);
        if (s.size() > capacity) {
            s.pop_front();
            y.pop_front();
            rho.pop_front();
        }
    }

    // Two-loop recursion, H0 scaled by the newest curvature pair.
    std::vector<double> direction(std::span<const double> g) const {
        std::vector<double> q(g.begin(), g.end());
        std::vector<double> alpha(s.size());
        for (std::size_t i = s.size(); i-- > 0;) {
            alpha[i] = rho[i] * dot(s[i], q);
            for (std::size_t j = 0; j < q.size(); ++j) q[j] -= alpha[i] * y[i][j];
        }
        if (!s.empty()) {
            const double gamma = dot(s.back(), y.back()) / dot(y.back(), y.back());
            for (double& qi : q) qi *= gamma;
        }
        for (std::size_t i = 0; i < s.size(); ++i) {
            const double beta = rho[i] * dot(y[i], q);
            for (std::size_t j = 0; j < q.size(); ++j) q[j] += (alpha[i] - beta) * s[i][j];
        }
        for (double& qi : q) qi = -qi;
        return q;
    }
};

}  // namespace

double calib_cost(const CalibrationProblem& problem, std::span<const double> theta) {
    check_theta(problem, theta);
    problem.model->set_params(theta);
    double cost = 0.0;
    for (const Instrument& inst : problem.instruments) {
        const mc::GreeksResult res = mc::mc_greeks(*problem.model, problem.x0, inst.payoff,
                                                   inst.grid, problem.n_paths, problem.seed);
        const double resid = res.price - inst.market_price;
        cost += resid * resid;
    }
    return cost;
}

std::vector<double> calib_gradient(const CalibrationProblem& problem,
                                   std::span<const double> theta) {
    return eval_cost_grad(problem, theta).grad;
}

CalibrationResult calibrate(const CalibrationProblem& problem, int max_iters, double grad_tol) {
    problem.validate();
    if (max_iters < 1) throw std::invalid_argument("calibrate: max_iters must be >= 1");

    std::vector<double> x = problem.theta0;
    CostAndGrad cur;
    try {
        cur = eval_cost_grad(problem, x);
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("calibrate: initial evaluation failed: ") + e.what());
    }

    CalibrationResult result;
    result.cost_history.push_back(cur.cost);
    result.grad_norm_history.push_back(norm2(projected_gradient(problem, x, cur.grad)));

    LbfgsMemory memory;
    constexpr double c1 = 1e-4;

    for (int iter = 1; iter <= max_iters; ++iter) {
        const std::vector<double> pg = projected_gradient(problem, x, cur.grad);
        if (norm2(pg) <= grad_tol) {
            result.converged = true;
            break;
        }

        std::vector<double> d = memory.direction(cur.grad);
        if (dot(d, cur.grad) >= 0.0) {  // not a descent direction; fall back to steepest
            for (std::size_t j = 0; j < d.size(); ++j) d[j] = -cur.grad[j];
        }

        bool accepted = false;
        std::vector<double> x_new;
        CostAndGrad next;
        double t = 1.0;
        for (int halving = 0; halving < 50; ++halving, t *= 0.5) {
            std::vector<double> cand(x.size());
            for (std::size_t j = 0; j < x.size(); ++j) cand[j] = x[j] + t * d[j];
            cand = project(problem, cand);
            std::vector<double> dx(x.size());
            for (std::size_t j = 0; j < x.size(); ++j) dx[j] = cand[j] - x[j];
            if (norm2(dx) == 0.0) continue;  // projection ate the whole step
            double f_cand;
            try {
                f_cand = calib_cost(problem, cand);
            } catch (const std::exception& e) {
                throw std::runtime_error("calibrate: iteration " + std::to_string(iter) +
                                         ": cost evaluation failed: " + e.what());
            }
            const double decrease = std::min(0.0, dot(cur.grad, dx));
            if (f_cand <= cur.cost + c1 * decrease) {
                x_new = std::move(cand);
                next.cost = f_cand;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            result.converged = true;  // step stalled: no decrease left at this point
            break;
        }

        try {
            next.grad = calib_gradient(problem, x_new);
        } catch (const std::exception& e) {
            throw std::runtime_error("calibrate: iteration " + std::to_string(iter) +
                                     ": gradient evaluation failed: " + e.what());
        }

        std::vector<double> s(x.size()), yv(x.size());
        for (std::size_t j = 0; j < x.size(); ++j) {
            s[j] = x_new[j] - x[j];
            yv[j] = next.grad[j] - cur.grad[j];
        }
        memory.push(std::move(s), std::move(yv));

        x = std::move(x_new);
        cur = std::move(next);
        result.iterations = iter;
        result.cost_history.push_back(cur.cost);
        result.grad_norm_history.push_back(norm2(projected_gradient(problem, x, cur.grad)));
    }

    if (!result.converged) {
        // Ran out of iterations; report the last projected gradient check.
        result.converged = norm2(projected_gradient(problem, x, cur.grad)) <= grad_tol;
    }
    problem.model->set_params(x);
    result.theta_star = std::move(x);
    return result;
}

}  // namespace adjg::calib
