#include "adjg/check.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <iomanip>
#include <ostream>

#include "adjg/copula.hpp"
#include "adjg/linalg.hpp"
#include "adjg/payoff.hpp"
#include "adjg/pde.hpp"
#include "adjg/program.hpp"
#include "adjg/rng.hpp"
#include "adjg/sde.hpp"
#include "adjg/simple_example.hpp"
#include "adjg/tape.hpp"
#include "adjg/verify.hpp"

namespace adjg::check {

namespace {

double rel_diff(double a, double b) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-10});
}

double max_rel_diff(std::span<const double> a, std::span<const double> b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, rel_diff(a[i], b[i]));
    return worst;
}

pde::PdeProblem sample_pde_problem() {
    const int n = 21;
    std::vector<double> target(n, 0.0);
    return pde::PdeProblem::make(
        0.0, n, 0.05, 50, 0.02, [](double) { return 0.0; }, [](double) { return 0.0; },
        [](double x) { return std::exp(-20.0 * (x - 0.5) * (x - 0.5)); }, std::move(target));
}

CheckRow check_pde_step_dot_product() {
    const pde::PdeProblem p = sample_pde_problem();
    verify::ApplyFn tangent = [&](std::span<const double> q) { return pde::tangent_step(p, q); };
    verify::ApplyFn adjoint = [&](std::span<const double> q) { return pde::adjoint_step(p, q); };
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        worst = std::max(worst, verify::dot_product_check(tangent, adjoint, p.n_space, 900 + trial));
    }
    return {"dot-product identity: pde step operator", worst, 1e-13, worst <= 1e-13};
}

CheckRow check_sde_step_dot_product() {
    const auto model = mc::make_local_vol_poly(0.05, 0.1, 0.02, 0.005);
    const std::vector<double> x{1.3};
    const std::vector<double> dw{0.37};
    ad::Tape tape;
    const std::vector<ad::NodeId> outs = model->record_step(tape, x, 0.0, 0.25, dw);
    const int n = model->dim();
    const int np = model->n_params();
    // Tangent and adjoint of the step map in the state argument, routed
    // through the two sweep directions of the same tape.
    verify::ApplyFn tangent = [&](std::span<const double> q) {
        std::vector<double> seed(n + np, 0.0);
        std::copy(q.begin(), q.end(), seed.begin());
        return ad::forward_sweep_many(tape, outs, seed);
    };
    verify::ApplyFn adjoint = [&](std::span<const double> w) {
        std::vector<double> full = ad::vjp(tape, outs, w);
        full.resize(n);
        return full;
    };
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        worst = std::max(worst, verify::dot_product_check(tangent, adjoint, n, 1700 + trial));
    }
    return {"dot-product identity: sde step jacobian pair", worst, 1e-13, worst <= 1e-13};
}

CheckRow check_random_tape_dot_products() {
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        CounterRng rng(5000 + trial);
        const int n_inputs = 2 + static_cast<int>(rng.next_uniform() * 6.0);
        const int n_ops = 20 + static_cast<int>(rng.next_uniform() * 80.0);
        const ad::Program prog = ad::random_smooth_program(7100 + trial, n_inputs, n_ops);
        std::vector<double> x(n_inputs);
        for (double& xi : x) xi = 4.0 * rng.next_uniform() - 2.0;
        ad::Tape tape;
        const ad::NodeId out = prog.record(tape, x);
        verify::ApplyFn tangent = [&](std::span<const double> q) {
            return std::vector<double>{ad::forward_sweep(tape, out, q)};
        };
        verify::ApplyFn adjoint = [&](std::span<const double> w) {
            const ad::NodeId outs[1] = {out};
            return ad::vjp(tape, outs, w);
        };
        worst = std::max(worst,
                         verify::dot_product_check(tangent, adjoint, n_inputs, 9900 + trial));
    }
    return {"dot-product identity: 100 random elementary tapes", worst, 1e-13, worst <= 1e-13};
}

void simple_example_gradients(std::uint64_t seed, std::vector<double>& fwd,
                              std::vector<double>& rev, std::vector<double>& fd,
                              std::vector<double>& cstep) {
    CounterRng rng(seed);
    const double a = 0.5 + rng.next_uniform();
    const double b = 0.5 + rng.next_uniform();
    const double c = 0.5 + rng.next_uniform();
    const double w0 = 1.0;
    fwd = simple_example_grad_forward(a, b, c, w0);
    rev = simple_example_grad_reverse(a, b, c, w0);
    const std::vector<double> x{a, b, c};
    fd = verify::fd_gradient(
        [w0](std::span<const double> p) { return simple_example_value(p[0], p[1], p[2], w0); }, x);
    cstep = verify::complex_step_gradient(
        [w0](std::span<const std::complex<double>> p) {
            return simple_example<std::complex<double>>(p[0], p[1], p[2], w0);
        },
        x);
}

CheckRow check_simple_example(const char* which, double tol) {
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> fwd, rev, fd, cstep;
        simple_example_gradients(42 + trial, fwd, rev, fd, cstep);
        if (std::string(which) == "forward") worst = std::max(worst, max_rel_diff(rev, fwd));
        else if (std::string(which) == "fd") worst = std::max(worst, max_rel_diff(rev, fd));
        else worst = std::max(worst, max_rel_diff(rev, cstep));
    }
    std::string name = std::string("simple example: reverse vs ") + which + " gradient";
    return {std::move(name), worst, tol, worst <= tol};
}

CheckRow check_pde_duality() {
    const pde::PdeProblem p = sample_pde_problem();
    const pde::PdeTrajectory traj = pde::pde_solve(p);
    const std::vector<double> bar = pde::pde_adjoint(p, traj);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        CounterRng rng(3300 + trial);
        std::vector<double> u0_dot(p.n_space);
        rng.fill_normal(u0_dot);
        const double f_dot = pde::pde_tangent(p, traj, u0_dot);
        worst = std::max(worst, rel_diff(f_dot, dot(bar, u0_dot)));
    }
    return {"pde full-sweep duality <u0_bar, u0_dot> = F_dot", worst, 1e-12, worst <= 1e-12};
}

CheckRow check_cholesky_duality() {
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        CounterRng rng(6200 + trial);
        const int n = 2 + static_cast<int>(rng.next_uniform() * 7.0);
        const Matrix rho = copula::random_correlation(n, 640 + trial);
        const Matrix chol = copula::cholesky(rho);
        Matrix cbar(n, n), drho(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j <= i; ++j) {
                cbar(i, j) = rng.next_normal();
                if (i != j) {
                    drho(i, j) = rng.next_normal();
                    drho(j, i) = drho(i, j);
                }
            }
        const Matrix rho_bar = copula::cholesky_adjoint(chol, cbar);
        // dC from central differences of the factorization along drho.
        const double h = 1e-6;
        Matrix rho_p = rho, rho_m = rho;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                rho_p(i, j) += h * drho(i, j);
                rho_m(i, j) -= h * drho(i, j);
            }
        const Matrix cp = copula::cholesky(rho_p);
        const Matrix cm = copula::cholesky(rho_m);
        double rhs = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j <= i; ++j) rhs += cbar(i, j) * (cp(i, j) - cm(i, j)) / (2.0 * h);
        const double lhs = lower_inner(rho_bar, drho);
        worst = std::max(worst, rel_diff(lhs, rhs));
    }
    return {"cholesky adjoint duality <rho_bar, drho> = <c_bar, dC>", worst, 1e-6, worst <= 1e-6};
}

CheckRow check_copula_tangent_adjoint() {
    double worst = 0.0;
    for (int n = 2; n <= 6; ++n) {
        const copula::CorrelationModel model =
            copula::CorrelationModel::make(copula::random_correlation(n, 100 + n));
        std::vector<std::unique_ptr<copula::Marginal>> own;
        copula::MarginalSet marginals;
        for (int i = 0; i < n; ++i) {
            own.push_back(copula::make_normal_marginal(0.1 * i, 1.0 + 0.1 * i));
            marginals.push_back(own.back().get());
        }
        std::vector<double> weights(n, 1.0);
        const Payoff payoff = smooth_power_payoff(weights, 2.0, 0.5);
        CounterRng rng(8800 + n);
        std::vector<double> xi(n);
        rng.fill_normal(xi);
        const copula::CopulaPathWork work = copula::copula_sample(model, marginals, xi);
        const copula::PathCorrSens sens = copula::adjoint_corr_sens(model, marginals, payoff, work);
        for (int l = 1; l < n; ++l)
            for (int k = 0; k < l; ++k) {
                const double tg = copula::tangent_corr_sens(model, marginals, payoff, l, k, work);
                worst = std::max(worst, rel_diff(tg, sens.rho_bar(l, k)));
            }
    }
    return {"copula tangent vs adjoint per-path correlation sens", worst, 1e-12, worst <= 1e-12};
}

CheckRow check_sde_path_tangent_adjoint() {
    const auto model = mc::make_gbm_basket(3, 0.04, {0.2, 0.3, 0.25});
    const std::vector<double> x0{1.0, 1.2, 0.8};
    const std::vector<double> grid = mc::uniform_grid(1.0, 8);
    const Payoff payoff = smooth_power_payoff({1.0, 1.0, 1.0}, 2.0, 0.0);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        CounterRng rng(4400, trial);
        const mc::PathRecord path = mc::simulate_path(*model, x0, grid, rng);
        const std::vector<double> tg = mc::tangent_deltas(*model, path, payoff);
        const mc::PathSens adj = mc::adjoint_sweep(*model, path, payoff);
        worst = std::max(worst, max_rel_diff(tg, adj.deltas));
    }
    return {"sde per-path tangent vs adjoint deltas", worst, 1e-13, worst <= 1e-13};
}

}  // namespace

std::vector<CheckRow> standard_battery() {
    std::vector<CheckRow> rows;
    rows.push_back(check_pde_step_dot_product());
    rows.push_back(check_sde_step_dot_product());
    rows.push_back(check_random_tape_dot_products());
    rows.push_back(check_simple_example("forward", 1e-12));
    rows.push_back(check_simple_example("fd", 1e-5));
    rows.push_back(check_simple_example("complex-step", 1e-12));
    rows.push_back(check_pde_duality());
    rows.push_back(check_cholesky_duality());
    rows.push_back(check_copula_tangent_adjoint());
    rows.push_back(check_sde_path_tangent_adjoint());
    return rows;
}

void print_table(const std::vector<CheckRow>& rows, std::ostream& os) {
    for (const CheckRow& row : rows) {
        os << (row.pass ? "PASS" : "FAIL") << "  " << std::left << std::setw(56) << row.name
           << "  measure " << std::scientific << std::setprecision(3) << row.measure
           << "  threshold " << row.threshold << std::defaultfloat << '\n';
    }
}

bool all_pass(const std::vector<CheckRow>& rows) {
    return std::all_of(rows.begin(), rows.end(), [](const CheckRow& r) { return r.pass; });
}

}  // namespace adjg::check
