// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Numbers, tolerances and runtime budgets are fixed here.
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "adjg/bench.hpp"
#include "adjg/calibrate.hpp"
#include "adjg/check.hpp"
#include "adjg/copula.hpp"
#include "adjg/normal.hpp"
#include "adjg/payoff.hpp"
#include "adjg/pde.hpp"
#include "adjg/rng.hpp"
#include "adjg/scenario.hpp"
#include "adjg/sde.hpp"
#include "adjg/simple_example.hpp"
#include "adjg/tape.hpp"
#include "adjg/verify.hpp"

namespace fs = std::filesystem;
using namespace adjg;

namespace {

struct Criterion {
    int id;
    std::string title;
    bool pass = true;
    double seconds = 0.0;
    std::string detail;

    void require(bool ok, const std::string& why) {
        if (!ok && pass) {
            pass = false;
            detail = why;
        }
    }
};

double rel_diff(double a, double b) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-10});
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

// ---------------------------------------------------------------------------

Criterion criterion1() {
    Criterion c{1, "composite example: forward, reverse, fd and complex step agree"};
    Stopwatch watch;
    double worst_fr = 0.0, worst_fd = 0.0, worst_cs = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        CounterRng rng(1000 + trial);
        const double a = 0.5 + rng.next_uniform();
        const double b = 0.5 + rng.next_uniform();
        const double cc = 0.5 + rng.next_uniform();
        const double w0 = 1.0;
        const std::vector<double> rev = simple_example_grad_reverse(a, b, cc, w0);
        const std::vector<double> fwd = simple_example_grad_forward(a, b, cc, w0);
        const std::vector<double> x{a, b, cc};
        const std::vector<double> fd = verify::fd_gradient(
            [w0](std::span<const double> p) { return simple_example_value(p[0], p[1], p[2], w0); },
            x, 1e-6);
        const std::vector<double> cs = verify::complex_step_gradient(
            [w0](std::span<const std::complex<double>> p) {
                return simple_example<std::complex<double>>(p[0], p[1], p[2], w0);
            },
            x);
        for (int i = 0; i < 3; ++i) {
            worst_fr = std::max(worst_fr, rel_diff(rev[i], fwd[i]));
            worst_fd = std::max({worst_fd, rel_diff(rev[i], fd[i]), rel_diff(fwd[i], fd[i])});
            worst_cs = std::max({worst_cs, rel_diff(rev[i], cs[i]), rel_diff(fwd[i], cs[i])});
        }
    }
    c.require(worst_fr <= 1e-12, "forward vs reverse " + fmt(worst_fr));
    c.require(worst_fd <= 1e-5, "fd disagreement " + fmt(worst_fd));
    c.require(worst_cs <= 1e-12, "complex-step disagreement " + fmt(worst_cs));
    c.seconds = watch.seconds();
    c.require(c.seconds < 1.0, "runtime " + fmt(c.seconds) + " s exceeds 1 s");
    c.detail = "fwd/rev " + fmt(worst_fr) + ", fd " + fmt(worst_fd) + ", cstep " + fmt(worst_cs);
    return c;
}

Criterion criterion2() {
    Criterion c{2, "dot-product identity: pde step, sde step jacobians, 100 random tapes"};
    Stopwatch watch;
    const std::vector<check::CheckRow> rows = check::standard_battery();
    std::string residuals;
    for (const check::CheckRow& row : rows) {
        if (row.name.rfind("dot-product identity:", 0) == 0) {
            c.require(row.measure < 1e-13, row.name + " residual " + fmt(row.measure));
            residuals += (residuals.empty() ? "" : ", ") + fmt(row.measure);
        }
    }
    c.seconds = watch.seconds();
    c.detail = "residuals " + residuals;
    return c;
}

Criterion criterion3() {
    Criterion c{3, "pde adjoint equals 21 tangent directions and fd on three presets"};
    Stopwatch watch;
    const int n = 21, m = 50;
    const double dx = 0.05, dt = 0.02;  // c = dt/(2 dx) = 0.2

    struct Preset {
        const char* name;
        double (*initial)(double);
        double (*target)(double);
    };
    const Preset presets[3] = {
        {"bump-to-zero", [](double s) { return std::exp(-20.0 * (s - 0.5) * (s - 0.5)); },
         [](double) { return 0.0; }},
        {"ramp-to-sine", [](double s) { return s; },
         [](double s) { return std::sin(3.14159265358979323846 * s); }},
        {"sine-to-bump", [](double s) { return std::sin(3.14159265358979323846 * s); },
         [](double s) { return std::exp(-20.0 * (s - 0.5) * (s - 0.5)); }},
    };

    double worst_tangent = 0.0, worst_fd = 0.0;
    for (const Preset& preset : presets) {
        std::vector<double> target(n);
        for (int j = 0; j < n; ++j) target[j] = preset.target(static_cast<double>(j) / (n - 1));
        const pde::PdeProblem p = pde::PdeProblem::make(
            0.0, n, dx, m, dt, [](double) { return 0.0; }, [](double) { return 0.0; },
            [&preset](double x) { return preset.initial(x); }, std::move(target));
        const pde::PdeTrajectory traj = pde::pde_solve(p);
        const std::vector<double> bar = pde::pde_adjoint(p, traj);

        std::vector<double> u0(n);
        for (int j = 0; j < n; ++j) u0[j] = p.initial(p.x_at(j));
        const std::vector<double> fd = verify::fd_gradient(
            [&](std::span<const double> v) {
                pde::PdeProblem q = p;
                std::vector<double> init(v.begin(), v.end());
                q.initial = [init, &p](double x) {
                    return init[static_cast<int>(std::lround((x - p.domain_lo) / p.dx))];
                };
                return pde::pde_cost(pde::pde_solve(q), q.target);
            },
            u0, 1e-6);

        for (int j = 0; j < n; ++j) {
            std::vector<double> e(n, 0.0);
            e[j] = 1.0;
            worst_tangent = std::max(worst_tangent, rel_diff(bar[j], pde::pde_tangent(p, traj, e)));
            worst_fd = std::max(worst_fd, rel_diff(bar[j], fd[j]));
        }
    }
    c.require(worst_tangent <= 1e-12, "tangent disagreement " + fmt(worst_tangent));
    c.require(worst_fd <= 1e-5, "fd disagreement " + fmt(worst_fd));
    c.seconds = watch.seconds();
    c.require(c.seconds < 1.0, "runtime " + fmt(c.seconds) + " s exceeds 1 s");
    c.detail = "tangent " + fmt(worst_tangent) + ", fd " + fmt(worst_fd);
    return c;
}

Criterion criterion4() {
    Criterion c{4, "sde greeks: call delta vs closed form, per-path duality, frozen-draw fd"};
    Stopwatch watch;
    const double s0 = 100.0, strike = 100.0, mu = 0.05, nu = 0.2, t_end = 1.0;
    const int m = 64;
    const long n_paths = 100000;
    const std::uint64_t seed = 20250810;

    const auto model = mc::make_gbm_1d(mu, nu);
    const std::vector<double> x0{s0};
    const std::vector<double> grid = mc::uniform_grid(t_end, m);
    const Payoff payoff = call_payoff(strike);

    const mc::GreeksResult res = mc::mc_greeks(*model, x0, payoff, grid, n_paths, seed);
    const double d1 =
        (std::log(s0 / strike) + (mu + 0.5 * nu * nu) * t_end) / (nu * std::sqrt(t_end));
    const double closed_form = std::exp(mu * t_end) * norm_cdf(d1);
    const double delta_gap = std::abs(res.deltas[0] - closed_form);
    c.require(delta_gap < 3.0 * res.delta_ses[0],
              "delta " + fmt(res.deltas[0]) + " vs closed form " + fmt(closed_form) + " gap " +
                  fmt(delta_gap) + " > 3 se " + fmt(3.0 * res.delta_ses[0]));

    double worst_pair = 0.0, worst_fd = 0.0;
    const std::vector<double> theta0(model->params().begin(), model->params().end());
    for (long p = 0; p < 50; ++p) {
        CounterRng rng(seed, p);
        const mc::PathRecord path = mc::simulate_path(*model, x0, grid, rng);
        const std::vector<double> tg = mc::tangent_deltas(*model, path, payoff);
        const mc::PathSens adj = mc::adjoint_sweep(*model, path, payoff);
        worst_pair = std::max(worst_pair, rel_diff(tg[0], adj.deltas[0]));

        const std::vector<double> fd = verify::fd_gradient(
            [&](std::span<const double> th) {
                model->set_params(th);
                std::vector<double> x(x0);
                std::vector<double> dw(1);
                for (int k = 0; k < path.n_steps(); ++k) {
                    const double dt = path.times[k + 1] - path.times[k];
                    dw[0] = path.draw(k)[0] * std::sqrt(dt);
                    x = model->step(x, path.times[k], dt, dw);
                }
                model->set_params(theta0);
                return payoff.value(x);
            },
            theta0, 1e-6);
        for (int i = 0; i < 2; ++i) {
            worst_fd = std::max(worst_fd, rel_diff(adj.param_sens[i], fd[i]));
        }
    }
    c.require(worst_pair <= 1e-13, "tangent/adjoint delta gap " + fmt(worst_pair));
    c.require(worst_fd <= 1e-5, "frozen-draw fd gap " + fmt(worst_fd));
    c.seconds = watch.seconds();
    c.require(c.seconds < 30.0, "runtime " + fmt(c.seconds) + " s exceeds 30 s");
    c.detail = "delta gap " + fmt(delta_gap) + " (3se " + fmt(3.0 * res.delta_ses[0]) +
               "), pair " + fmt(worst_pair) + ", fd " + fmt(worst_fd);
    return c;
}

Criterion criterion5() {
    Criterion c{5, "copula: cholesky duality, frozen-draw fd, adjoint beats the tangent loop"};
    Stopwatch watch;

    // (a) adjoint duality battery row over sizes 2..8, 50 cases
    const std::vector<check::CheckRow> rows = check::standard_battery();
    double duality = 0.0;
    for (const check::CheckRow& row : rows) {
        if (row.name.rfind("cholesky adjoint duality", 0) == 0) {
            duality = row.measure;
            c.require(row.measure <= 1e-6, "cholesky duality residual " + fmt(row.measure));
        }
    }

    // (b) 5-name basket correlation risk vs per-entry frozen-draw bumps
    const int n = 5;
    const long n_paths = 2000;
    const std::uint64_t seed = 31;
    const copula::CorrelationModel model =
        copula::CorrelationModel::make(copula::equicorrelation(n, 0.3));
    std::vector<std::unique_ptr<copula::Marginal>> own;
    copula::MarginalSet marginals;
    for (int i = 0; i < n; ++i) {
        own.push_back(copula::make_normal_marginal(0.0, 1.0));
        marginals.push_back(own.back().get());
    }
    const Payoff payoff = basket_call_payoff(std::vector<double>(n, 0.2), 0.1);
    const copula::CorrRiskResult risk = copula::corr_risk(model, marginals, payoff, n_paths, seed);
    double worst_fd = 0.0;
    const double h = 1e-6;
    for (int l = 1; l < n; ++l)
        for (int k = 0; k < l; ++k) {
            auto priced_at = [&](double bump) {
                Matrix rho = model.rho;
                rho(l, k) += bump;
                rho(k, l) += bump;
                return copula::price_serial(copula::CorrelationModel::make(rho), marginals, payoff,
                                            n_paths, seed)
                    .price;
            };
            const double fd = (priced_at(h) - priced_at(-h)) / (2.0 * h);
            worst_fd = std::max(worst_fd, rel_diff(risk.rho_bar(l, k), fd));
        }
    c.require(worst_fd <= 1e-5, "frozen-draw fd gap " + fmt(worst_fd));

    // (c) one adjoint sweep vs the tangent per-entry loop, N = 10 and 20
    const std::vector<int> names{10, 20};
    const bench::BenchReport speedup = bench::bench_copula_speedup(names);
    const double r10 = speedup.rows[0].ratio;
    const double r20 = speedup.rows[1].ratio;
    c.require(r10 >= 10.0 / 4.0, "speedup at N=10 is " + fmt(r10) + " < 2.5");
    c.require(r20 > r10, "speedup does not grow: N=20 " + fmt(r20) + " vs N=10 " + fmt(r10));

    c.seconds = watch.seconds();
    c.detail = "duality " + fmt(duality) + ", fd " + fmt(worst_fd) + ", speedup N10 " + fmt(r10) +
               ", N20 " + fmt(r20);
    return c;
}

Criterion criterion6() {
    Criterion c{6, "calibration: synthetic vol recovery and gradient/fd agreement under crn"};
    Stopwatch watch;
    calib::CalibrationProblem problem;
    problem.model = mc::make_gbm_1d_fixed_drift(0.05, 0.2);
    problem.x0 = {100.0};
    problem.n_paths = 20000;
    problem.seed = 7777;
    calib::Instrument inst;
    inst.payoff = call_payoff(100.0);
    inst.grid = mc::uniform_grid(1.0, 32);
    inst.market_price =
        mc::mc_greeks(*problem.model, problem.x0, inst.payoff, inst.grid, problem.n_paths,
                      problem.seed)
            .price;
    problem.instruments.push_back(std::move(inst));
    problem.theta0 = {0.3};
    problem.lo = {0.05};
    problem.hi = {1.5};

    const std::vector<double> g = calib::calib_gradient(problem, problem.theta0);
    const std::vector<double> fd = verify::fd_gradient(
        [&](std::span<const double> th) { return calib::calib_cost(problem, th); }, problem.theta0,
        1e-6);
    const double fd_gap = rel_diff(g[0], fd[0]);
    c.require(fd_gap <= 1e-5, "gradient vs fd gap " + fmt(fd_gap));

    const calib::CalibrationResult res = calib::calibrate(problem, 50, 1e-9);
    const double miss = std::abs(res.theta_star[0] - 0.2);
    c.require(res.iterations <= 50, "iterations " + std::to_string(res.iterations));
    c.require(miss <= 1e-3, "recovered vol misses truth by " + fmt(miss));

    c.seconds = watch.seconds();
    c.require(c.seconds < 60.0, "runtime " + fmt(c.seconds) + " s exceeds 60 s");
    c.detail = "vol miss " + fmt(miss) + " in " + std::to_string(res.iterations) +
               " iterations, fd gap " + fmt(fd_gap);
    return c;
}

Criterion criterion7() {
    Criterion c{7, "cost claims: reverse ratio <= 10 and flat, forward grows with inputs"};
    Stopwatch watch;
    const std::vector<int> sizes{10, 100, 1000};
    const bench::BenchReport report = bench::bench_cheap_gradient(sizes);

    double min_ratio = 1e300, max_ratio = 0.0;
    double forward10 = 0.0, forward100 = 0.0;
    std::string ratios;
    for (const bench::BenchRow& row : report.rows) {
        if (row.case_name.rfind("reverse-", 0) == 0) {
            min_ratio = std::min(min_ratio, row.ratio);
            max_ratio = std::max(max_ratio, row.ratio);
            c.require(row.ratio <= 10.0, row.case_name + " ratio " + fmt(row.ratio) + " > 10");
            ratios += (ratios.empty() ? "" : "/") + fmt(row.ratio);
        }
        if (row.case_name == "forward-n10") forward10 = row.gradient_time;
        if (row.case_name == "forward-n100") forward100 = row.gradient_time;
    }
    c.require(max_ratio <= 2.0 * min_ratio,
              "reverse ratio not flat: " + fmt(min_ratio) + " .. " + fmt(max_ratio));
    c.require(forward100 >= 5.0 * forward10,
              "forward gradient time grew only " + fmt(forward100 / forward10) +
                  "x from n=10 to n=100");
    c.seconds = watch.seconds();
    c.detail = "reverse ratios " + ratios + ", forward growth " + fmt(forward100 / forward10) + "x";
    return c;
}

Criterion criterion8() {
    Criterion c{8, "determinism: identical config and seed give bit-identical outputs"};
    Stopwatch watch;
    const fs::path base = fs::temp_directory_path() / "adjg_acceptance_determinism";
    std::error_code ec;
    fs::remove_all(base, ec);
    fs::create_directories(base);

    struct Scenario {
        const char* kind;
        std::string block;
    };
    const std::vector<Scenario> scenarios = {
        {"simple-example", R"("simple-example": {"a": 1.1, "b": 0.7, "c": 0.9, "w0": 1.0})"},
        {"pde", R"("pde": {"n_space": 21, "n_steps": 50, "dx": 0.05, "dt": 0.02,
                    "initial": "gaussian-bump", "target": "zero",
                    "bc_left": "zero", "bc_right": "zero"})"},
        {"mc-sde", R"("mc-sde": {"model": "gbm-1d", "model_params": {"mu": 0.05, "nu": 0.2},
                    "x0": [100.0], "payoff": {"preset": "call", "strike": 100.0},
                    "t_end": 1.0, "n_steps": 16, "n_paths": 5000, "seed": 99})"},
        {"copula", R"("copula": {"names": 4, "rho": {"equicorrelation": 0.3},
                    "marginals": {"preset": "normal", "mean": 0.0, "sd": 1.0},
                    "payoff": {"preset": "basket-call", "weights": [0.25, 0.25, 0.25, 0.25],
                               "strike": 0.0},
                    "n_paths": 3000, "seed": 5})"},
        {"calibrate", R"("calibrate": {"model": "gbm-1d-fixed-drift",
                    "model_params": {"mu": 0.05, "nu": 0.3}, "x0": [100.0],
                    "instruments": [{"payoff": {"preset": "call", "strike": 100.0},
                                     "t_end": 1.0, "n_steps": 8, "market_price": 10.45}],
                    "theta0": [0.3], "bounds": [[0.05, 1.0]],
                    "n_paths": 2000, "seed": 3, "max_iters": 10, "grad_tol": 1e-8})"},
    };

    for (const Scenario& scenario : scenarios) {
        for (int rep = 1; rep <= 2; ++rep) {
            const fs::path out = base / (std::string(scenario.kind) + "_" + std::to_string(rep));
            const fs::path cfg =
                base / (std::string(scenario.kind) + std::to_string(rep) + ".json");
            std::ofstream os(cfg, std::ios::binary);
            os << "{\"kind\": \"" << scenario.kind << "\", \"output_dir\": \"" << out.string()
               << "\", " << scenario.block << "}";
            os.close();
            if (scenario::run_scenario(cfg.string()) != scenario::kExitOk) {
                c.require(false, std::string(scenario.kind) + " run failed");
            }
        }
        if (!c.pass) break;
        const fs::path d1 = base / (std::string(scenario.kind) + "_1");
        const fs::path d2 = base / (std::string(scenario.kind) + "_2");
        for (const auto& entry : fs::directory_iterator(d1)) {
            const fs::path other = d2 / entry.path().filename();
            std::ifstream a(entry.path(), std::ios::binary), b(other, std::ios::binary);
            std::ostringstream sa, sb;
            sa << a.rdbuf();
            sb << b.rdbuf();
            c.require(sa.str() == sb.str(), std::string(scenario.kind) + "/" +
                                                entry.path().filename().string() + " differs");
        }
    }
    fs::remove_all(base, ec);
    c.seconds = watch.seconds();
    c.detail = "5 scenario kinds, all output files compared byte for byte";
    return c;
}

}  // namespace

int main() {
    std::vector<Criterion> results;
    results.push_back(criterion1());
    results.push_back(criterion2());
    results.push_back(criterion3());
    results.push_back(criterion4());
    results.push_back(criterion5());
    results.push_back(criterion6());
    results.push_back(criterion7());
    results.push_back(criterion8());

    int failures = 0;
    for (const Criterion& c : results) {
        std::printf("%s  criterion %d: %s (%.2f s)%s%s\n", c.pass ? "PASS" : "FAIL", c.id,
                    c.title.c_str(), c.seconds, c.detail.empty() ? "" : " -- ", c.detail.c_str());
        if (!c.pass) ++failures;
    }
    return failures;
}
