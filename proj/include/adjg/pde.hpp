#pragma once

#include <functional>
#include <span>
#include <vector>

namespace adjg::pde {

// Explicit scheme u_j^{k+1} = u_j^k + c (u_{j+1}^k - 2 u_j^k + u_{j-1}^k) on a
// uniform grid, boundary columns overwritten from the boundary data each step.
struct PdeProblem {
    double domain_lo = 0.0;
    double domain_hi = 1.0;
    int n_space = 0;   // N >= 3
    int n_steps = 0;   // M >= 0
    double dx = 0.0;
    double dt = 0.0;
    double c = 0.0;  // dt / (2 dx), recomputed by make()
    std::function<double(double)> left_bc;   // f(t)
    std::function<double(double)> right_bc;  // g(t)
    std::function<double(double)> initial;   // u0(x)
    std::vector<double> target;              // length N

    // Validates, derives domain_hi and c, and warns on stderr when the
    // stability bound 1 - 2c >= 0 is violated.
    static PdeProblem make(double domain_lo, int n_space, double dx, int n_steps, double dt,
                           std::function<double(double)> left_bc,
                           std::function<double(double)> right_bc,
                           std::function<double(double)> initial, std::vector<double> target);

    double x_at(int j) const { return domain_lo + j * dx; }
    double t_at(int k) const { return k * dt; }
};

struct PdeTrajectory {
    int n_space = 0;
    int n_steps = 0;
    std::vector<double> states;  // (M+1) x N row-major, states[k*N + j] = u_j^k

    double u(int k, int j) const { return states[static_cast<std::size_t>(k) * n_space + j]; }
    std::span<const double> row(int k) const {
        return {states.data() + static_cast<std::size_t>(k) * n_space,
                static_cast<std::size_t>(n_space)};
    }
    std::span<double> row(int k) {
        return {states.data() + static_cast<std::size_t>(k) * n_space,
                static_cast<std::size_t>(n_space)};
    }
};

// Runs the scheme, storing every time level (the adjoint needs none of them
// for this linear stencil, but the terminal row seeds both sweeps and the
// stored field is the module's contract).
PdeTrajectory pde_solve(const PdeProblem& p);

// Sum of squared terminal differences against the target.
double pde_cost(const PdeTrajectory& traj, std::span<const double> target);

// One application of the step operator to a perturbation (interior stencil
// rows; boundary rows are zero since boundary values are data).
std::vector<double> tangent_step(const PdeProblem& p, std::span<const double> q);

// Exact transpose of tangent_step.
std::vector<double> adjoint_step(const PdeProblem& p, std::span<const double> q);

// Directional derivative of the cost along an initial-condition perturbation.
double pde_tangent(const PdeProblem& p, const PdeTrajectory& traj, std::span<const double> u0_dot);

// Gradient of the cost with respect to every initial-condition node in one
// backward pass: seeds 2(u_j^M - Y_j), applies M transposed steps.
std::vector<double> pde_adjoint(const PdeProblem& p, const PdeTrajectory& traj);

}  // namespace adjg::pde
