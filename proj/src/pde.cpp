#include "adjg/pde.hpp"

#include <iostream>
#include <stdexcept>

namespace adjg::pde {

PdeProblem PdeProblem::make(double domain_lo, int n_space, double dx, int n_steps, double dt,
                            std::function<double(double)> left_bc,
                            std::function<double(double)> right_bc,
                            std::function<double(double)> initial, std::vector<double> target) {
    if (n_space < 3) throw std::invalid_argument("PdeProblem: n_space must be >= 3");
    if (n_steps < 0) throw std::invalid_argument("PdeProblem: n_steps must be >= 0");
    if (!(dx > 0.0) || !(dt > 0.0)) throw std::invalid_argument("PdeProblem: dx and dt must be positive");
    if (target.size() != static_cast<std::size_t>(n_space)) {
        throw std::invalid_argument("PdeProblem: target length must equal n_space");
    }
    PdeProblem p;
    p.domain_lo = domain_lo;
    p.n_space = n_space;
    p.dx = dx;
    p.n_steps = n_steps;
    p.dt = dt;
    p.domain_hi = domain_lo + (n_space - 1) * dx;
    p.c = dt / (2.0 * dx);
    p.left_bc = std::move(left_bc);
    p.right_bc = std::move(right_bc);
    p.initial = std::move(initial);
    p.target = std::move(target);
    if (1.0 - 2.0 * p.c < 0.0) {
        std::cerr << "warning: PdeProblem with c = " << p.c
                  << " violates the stability bound 1 - 2c >= 0\n";
    }
    return p;
}

PdeTrajectory pde_solve(const PdeProblem& p) {
    const int n = p.n_space;
    const int m = p.n_steps;
    PdeTrajectory traj;
    traj.n_space = n;
    traj.n_steps = m;
    traj.states.assign(static_cast<std::size_t>(m + 1) * n, 0.0);

    auto row0 = traj.row(0);
    for (int j = 0; j < n; ++j) row0[j] = p.initial(p.x_at(j));

    for (int k = 0; k < m; ++k) {
        auto prev = traj.row(k);
        auto next = traj.row(k + 1);
        next[0] = p.left_bc(p.t_at(k + 1));
        for (int j = 1; j < n - 1; ++j) {
            next[j] = prev[j] + p.c * (prev[j + 1] - 2.0 * prev[j] + prev[j - 1]);
        }
        next[n - 1] = p.right_bc(p.t_at(k + 1));
    }
    return traj;
}

double pde_cost(const PdeTrajectory& traj, std::span<const double> target) {
    if (target.size() != static_cast<std::size_t>(traj.n_space)) {
        throw std::invalid_argument("pde_cost: target length mismatch");
    }
    auto last = traj.row(traj.n_steps);
    double cost = 0.0;
    for (int j = 0; j < traj.n_space; ++j) {
        const double d = last[j] - target[j];
        cost += d * d;
    }
    return cost;
}

std::vector<double> tangent_step(const PdeProblem& p, std::span<const double> q) {
    if (q.size() != static_cast<std::size_t>(p.n_space)) {
        throw std::invalid_argument("tangent_step: vector length mismatch");
    }
    const int n = p.n_space;
    std::vector<double> out(n, 0.0);
    for (int j = 1; j < n - 1; ++j) {
        out[j] = (1.0 - 2.0 * p.c) * q[j] + p.c * (q[j + 1] + q[j - 1]);
    }
    return out;
}

std::vector<double> adjoint_step(const PdeProblem& p, std::span<const double> q) {
    if (q.size() != static_cast<std::size_t>(p.n_space)) {
        throw std::invalid_argument("adjoint_step: vector length mismatch");
    }
    const int n = p.n_space;
    std::vector<double> out(n, 0.0);
    // Scatter through each interior stencil row; this is the transpose of
    // tangent_step by construction, so the first and last components pick up
    // only the single c-coupling from their interior neighbour.
    for (int j = 1; j < n - 1; ++j) {
        const double bar = q[j];
        out[j - 1] += p.c * bar;
        out[j] += (1.0 - 2.0 * p.c) * bar;
        out[j + 1] += p.c * bar;
    }
    return out;
}

namespace {

void check_match(const PdeProblem& p, const PdeTrajectory& traj, const char* where) {
    if (traj.n_space != p.n_space || traj.n_steps != p.n_steps ||
        traj.states.size() != static_cast<std::size_t>(p.n_steps + 1) * p.n_space) {
        throw std::invalid_argument(std::string(where) + ": trajectory does not match problem");
    }
}

}  // namespace

double pde_tangent(const PdeProblem& p, const PdeTrajectory& traj, std::span<const double> u0_dot) {
    check_match(p, traj, "pde_tangent");
    if (u0_dot.size() != static_cast<std::size_t>(p.n_space)) {
        throw std::invalid_argument("pde_tangent: seed length mismatch");
    }
    std::vector<double> dot(u0_dot.begin(), u0_dot.end());
    for (int k = 0; k < p.n_steps; ++k) dot = tangent_step(p, dot);
    auto last = traj.row(p.n_steps);
    double f_dot = 0.0;
    for (int j = 0; j < p.n_space; ++j) {
        f_dot += 2.0 * (last[j] - p.target[j]) * dot[j];
    }
    return f_dot;
}

std::vector<double> pde_adjoint(const PdeProblem& p, const PdeTrajectory& traj) {
    check_match(p, traj, "pde_adjoint");
    auto last = traj.row(p.n_steps);
    std::vector<double> bar(p.n_space);
    for (int j = 0; j < p.n_space; ++j) bar[j] = 2.0 * (last[j] - p.target[j]);
    for (int k = p.n_steps - 1; k >= 0; --k) bar = adjoint_step(p, bar);
    return bar;
}

}  // namespace adjg::pde
