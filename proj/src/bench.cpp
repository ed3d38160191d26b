#include "adjg/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <sstream>

#include "adjg/copula.hpp"
#include "adjg/payoff.hpp"
#include "adjg/rng.hpp"
#include "adjg/sde.hpp"
#include "adjg/tape.hpp"

namespace adjg::bench {

namespace {

volatile double g_sink = 0.0;  // keeps the measured computations alive

std::string now_iso8601() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// The benchmark family: stride-doubling mixing layers so every output depends
// on every input after ~log2(n) layers, rotating product/exp, sum/log and
// product/sine layers. Bounded on all of R^n.
template <typename S>
S layered_function(std::span<const S> x) {
    using std::exp;
    using std::log;
    using std::sin;
    const int n = static_cast<int>(x.size());
    int depth = 2;
    while ((1 << (depth - 2)) < n) ++depth;

    std::vector<S> y(x.begin(), x.end());
    std::vector<S> z(y.size());
    for (int layer = 0; layer < depth; ++layer) {
        int stride = (1 << layer) % n;
        if (stride == 0) stride = 1;
        for (int i = 0; i < n; ++i) {
            const S& a = y[i];
            const S& b = y[(i + stride) % n];
            switch (layer % 3) {
                case 0: {
                    const S t = a * b;
                    z[i] = exp(-(t * t));
                    break;
                }
                case 1: {
                    const S t = a + b;
                    z[i] = log(t * t + 1.0);
                    break;
                }
                default:
                    z[i] = sin(a * b + (a - b));
            }
        }
        std::swap(y, z);
    }
    S total = y[0];
    for (int i = 1; i < n; ++i) total = total + y[i];
    return sin(total * (1.0 / n));
}

std::vector<double> bench_inputs(int n) {
    CounterRng rng(123);
    std::vector<double> x(n);
    for (double& xi : x) xi = 0.5 + rng.next_uniform();
    return x;
}

// Tape size for one evaluation, used to pre-reserve.
std::size_t taped_size(std::span<const double> x) {
    ad::Tape tape;
    std::vector<ad::Var> vars;
    vars.reserve(x.size());
    for (double xi : x) vars.push_back(ad::make_input(tape, xi));
    (void)layered_function<ad::Var>(std::span<const ad::Var>(vars));
    return tape.size();
}

}  // namespace

double median_seconds(const std::function<void()>& fn, int reps) {
    fn();  // warmup, discarded
    // Calibrate an inner loop so one repetition is comfortably measurable.
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const double once = std::max(seconds_since(t0), 1e-9);
    const long iters = std::max(1L, static_cast<long>(0.01 / once));

    std::vector<double> times;
    times.reserve(reps);
    for (int r = 0; r < reps; ++r) {
        const auto start = std::chrono::steady_clock::now();
        for (long i = 0; i < iters; ++i) fn();
        times.push_back(seconds_since(start) / static_cast<double>(iters));
    }
    std::sort(times.begin(), times.end());
    return times[times.size() / 2];
}

BenchReport bench_cheap_gradient(std::span<const int> sizes) {
    BenchReport report;
    report.timestamp = now_iso8601();
    report.repetitions = 5;

    for (const int n : sizes) {
        const std::vector<double> x = bench_inputs(n);
        const std::size_t nodes = taped_size(x);

        const double primal = median_seconds([&] { g_sink = layered_function<double>(x); });

        // Recording buffers are reused across repetitions; the measured work
        // is taping plus the sweep, not allocator churn.
        ad::Tape tape;
        tape.reserve(nodes);
        std::vector<ad::Var> vars;
        vars.reserve(x.size());

        const double reverse = median_seconds([&] {
            tape.clear();
            vars.clear();
            for (double xi : x) vars.push_back(ad::make_input(tape, xi));
            const ad::NodeId out = layered_function<ad::Var>(std::span<const ad::Var>(vars)).id();
            const std::vector<double> grad = ad::reverse_sweep(tape, out);
            g_sink = grad[0];
        });

        const double forward = median_seconds([&] {
            tape.clear();
            vars.clear();
            for (double xi : x) vars.push_back(ad::make_input(tape, xi));
            const ad::NodeId out = layered_function<ad::Var>(std::span<const ad::Var>(vars)).id();
            std::vector<double> seed(n, 0.0);
            double acc = 0.0;
            for (int i = 0; i < n; ++i) {
                seed[i] = 1.0;
                acc += ad::forward_sweep(tape, out, seed);
                seed[i] = 0.0;
            }
            g_sink = acc;
        });

        report.rows.push_back({"reverse-n" + std::to_string(n), n, primal, reverse,
                               reverse / primal});
        report.rows.push_back({"forward-n" + std::to_string(n), n, primal, forward,
                               forward / primal});
    }
    return report;
}

BenchReport bench_copula_speedup(std::span<const int> n_names) {
    BenchReport report;
    report.timestamp = now_iso8601();
    report.repetitions = 5;
    constexpr int n_sample_paths = 24;

    for (const int n : n_names) {
        const copula::CorrelationModel model =
            copula::CorrelationModel::make(copula::random_correlation(n, 2025 + n));
        std::vector<std::unique_ptr<copula::Marginal>> own;
        copula::MarginalSet marginals;
        for (int i = 0; i < n; ++i) {
            own.push_back(copula::make_normal_marginal(0.0, 1.0));
            marginals.push_back(own.back().get());
        }
        const Payoff payoff = basket_call_payoff(std::vector<double>(n, 1.0 / n), 0.0);

        std::vector<copula::CopulaPathWork> works;
        for (int i = 0; i < n_sample_paths; ++i) {
            CounterRng rng(777, i);
            std::vector<double> xi(n);
            rng.fill_normal(xi);
            works.push_back(copula::copula_sample(model, marginals, xi));
        }

        const double adjoint = median_seconds([&] {
            double acc = 0.0;
            for (const auto& work : works) {
                acc += copula::adjoint_corr_sens(model, marginals, payoff, work).rho_bar(n - 1, 0);
            }
            g_sink = acc;
        });
        const double tangent = median_seconds([&] {
            double acc = 0.0;
            for (const auto& work : works) {
                for (int l = 1; l < n; ++l)
                    for (int k = 0; k < l; ++k) {
                        acc += copula::tangent_corr_sens(model, marginals, payoff, l, k, work);
                    }
            }
            g_sink = acc;
        });

        report.rows.push_back({"copula-N" + std::to_string(n), n * (n - 1L) / 2, adjoint, tangent,
                               tangent / adjoint});
    }
    return report;
}

namespace {

// 4-dimensional diffusion whose drift mixes a configurable number of
// parameters; step Jacobians are analytic so the measurement isolates the
// recursion costs.
class ParamMixModel final : public mc::SdeModel {
public:
    explicit ParamMixModel(int n_params)
        : SdeModel(4, std::vector<double>(n_params, 0.02)) {}

    std::string name() const override { return "param-mix"; }

    void drift(std::span<const double> x, double t, std::span<const double> th,
               std::span<double> out) const override {
        drift_impl(x, t, th, out);
    }
    void drift(std::span<const ad::Var> x, double t, std::span<const ad::Var> th,
               std::span<ad::Var> out) const override {
        drift_impl(x, t, th, out);
    }
    void diffusion_dw(std::span<const double> x, double t, std::span<const double> th,
                      std::span<const double> dw, std::span<double> out) const override {
        diffusion_impl(x, t, th, dw, out);
    }
    void diffusion_dw(std::span<const ad::Var> x, double t, std::span<const ad::Var> th,
                      std::span<const double> dw, std::span<ad::Var> out) const override {
        diffusion_impl(x, t, th, dw, out);
    }

    StepJacobians step_jacobians(std::span<const double> x, double /*t*/, double dt,
                                 std::span<const double> dw) const override {
        const int n = dim();
        const int p = n_params();
        StepJacobians jac{Matrix(n, n), Matrix(n, p)};
        double theta_sum = 0.0;
        for (double t : params()) theta_sum += t;
        for (int i = 0; i < n; ++i) {
            jac.d_state(i, i) = 1.0 + theta_sum * dt + 0.2 * dw[i];
            for (int j = 0; j < p; ++j) jac.d_params(i, j) = x[i] * dt;
        }
        return jac;
    }

private:
    template <typename S>
    void drift_impl(std::span<const S> x, double, std::span<const S> th, std::span<S> out) const {
        S theta_sum = th[0];
        for (std::size_t j = 1; j < th.size(); ++j) theta_sum = theta_sum + th[j];
        for (int i = 0; i < dim(); ++i) out[i] = theta_sum * x[i];
    }
    template <typename S>
    void diffusion_impl(std::span<const S> x, double, std::span<const S>,
                        std::span<const double> dw, std::span<S> out) const {
        for (int i = 0; i < dim(); ++i) out[i] = x[i] * (0.2 * dw[i]);
    }
};

}  // namespace

BenchReport bench_sde_param_scaling(std::span<const int> n_params) {
    BenchReport report;
    report.timestamp = now_iso8601();
    report.repetitions = 5;
    constexpr int n_sample_paths = 16;

    for (const int p : n_params) {
        const ParamMixModel model(p);
        const std::vector<double> x0{1.0, 1.1, 0.9, 1.2};
        const std::vector<double> grid = mc::uniform_grid(1.0, 16);
        const Payoff payoff = basket_sum_payoff({0.25, 0.25, 0.25, 0.25});

        std::vector<mc::PathRecord> paths;
        for (int i = 0; i < n_sample_paths; ++i) {
            CounterRng rng(99, i);
            paths.push_back(mc::simulate_path(model, x0, grid, rng));
        }

        const double adjoint = median_seconds([&] {
            double acc = 0.0;
            for (const auto& path : paths) acc += mc::adjoint_sweep(model, path, payoff).deltas[0];
            g_sink = acc;
        });
        const double tangent = median_seconds([&] {
            double acc = 0.0;
            for (const auto& path : paths) acc += mc::tangent_param_sens(model, path, payoff)[0];
            g_sink = acc;
        });
        report.rows.push_back(
            {"sde-params-P" + std::to_string(p), p, adjoint, tangent, tangent / adjoint});
    }
    return report;
}

BenchReport bench_mc_threads(long n_paths, int n_steps) {
    BenchReport report;
    report.timestamp = now_iso8601();
    report.repetitions = 5;

    const auto model = mc::make_gbm_1d(0.05, 0.2);
    const std::vector<double> x0{100.0};
    const std::vector<double> grid = mc::uniform_grid(1.0, n_steps);
    const Payoff payoff = call_payoff(100.0);

    const double parallel = median_seconds(
        [&] { g_sink = mc::mc_greeks(*model, x0, payoff, grid, n_paths, 7).price; });
    const double serial = median_seconds(
        [&] { g_sink = mc::mc_greeks_serial(*model, x0, payoff, grid, n_paths, 7).price; });
    report.rows.push_back(
        {"mc-greeks-paths" + std::to_string(n_paths), n_paths, parallel, serial, serial / parallel});

    const copula::CorrelationModel corr = copula::CorrelationModel::make(copula::equicorrelation(5, 0.3));
    std::vector<std::unique_ptr<copula::Marginal>> own;
    copula::MarginalSet marginals;
    for (int i = 0; i < 5; ++i) {
        own.push_back(copula::make_normal_marginal(0.0, 1.0));
        marginals.push_back(own.back().get());
    }
    const Payoff basket = basket_call_payoff(std::vector<double>(5, 0.2), 0.0);
    const double cpar = median_seconds(
        [&] { g_sink = copula::corr_risk(corr, marginals, basket, n_paths, 7).price; });
    const double cser = median_seconds(
        [&] { g_sink = copula::corr_risk_serial(corr, marginals, basket, n_paths, 7).price; });
    report.rows.push_back(
        {"copula-risk-paths" + std::to_string(n_paths), n_paths, cpar, cser, cser / cpar});
    return report;
}

std::string BenchReport::to_csv() const {
    std::ostringstream os;
    os << "case,n_inputs,primal_time,gradient_time,ratio\n";
    for (const BenchRow& row : rows) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%s,%ld,%.9g,%.9g,%.9g\n", row.case_name.c_str(),
                      row.n_inputs, row.primal_time, row.gradient_time, row.ratio);
        os << buf;
    }
    return os.str();
}

std::string BenchReport::to_json() const {
    std::ostringstream os;
    os.precision(9);
    os << "{\"timestamp\":\"" << timestamp << "\",\"repetitions\":" << repetitions << ",\"rows\":[";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const BenchRow& row = rows[i];
        os << (i ? "," : "") << "{\"case\":\"" << row.case_name << "\",\"n_inputs\":" << row.n_inputs
           << ",\"primal_time\":" << row.primal_time << ",\"gradient_time\":" << row.gradient_time
           << ",\"ratio\":" << row.ratio << "}";
    }
    os << "]}";
    return os.str();
}

}  // namespace adjg::bench
