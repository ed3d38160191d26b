#include "adjg/sde.hpp"

#include <cmath>
#include <mutex>
#include <stdexcept>

#include "adjg/stats.hpp"

namespace adjg::mc {

void SdeModel::set_params(std::span<const double> theta) {
    if (theta.size() != theta_.size()) {
        throw std::invalid_argument("SdeModel: parameter count mismatch");
    }
    theta_.assign(theta.begin(), theta.end());
}

std::vector<std::string> SdeModel::param_names() const {
    std::vector<std::string> names(n_params());
    for (int i = 0; i < n_params(); ++i) names[i] = "theta" + std::to_string(i);
    return names;
}

std::vector<double> SdeModel::step(std::span<const double> x, double t, double dt,
                                   std::span<const double> dw) const {
    const int n = dim();
    std::vector<double> a(n), s(n), out(n);
    drift(x, t, theta_, a);
    diffusion_dw(x, t, theta_, dw, s);
    for (int i = 0; i < n; ++i) out[i] = x[i] + a[i] * dt + s[i];
    return out;
}

std::vector<ad::NodeId> SdeModel::record_step(ad::Tape& tape, std::span<const double> x, double t,
                                              double dt, std::span<const double> dw) const {
    const int n = dim();
    const int p = n_params();
    std::vector<ad::Var> xv, thv;
    xv.reserve(n);
    thv.reserve(p);
    for (int i = 0; i < n; ++i) xv.push_back(ad::make_input(tape, x[i]));
    for (int i = 0; i < p; ++i) thv.push_back(ad::make_input(tape, theta_[i]));
    std::vector<ad::Var> a(n), s(n);
    drift(xv, t, thv, a);
    diffusion_dw(xv, t, thv, dw, s);
    std::vector<ad::NodeId> out(n);
    for (int i = 0; i < n; ++i) out[i] = (xv[i] + a[i] * dt + s[i]).id();
    return out;
}

StepJacobians SdeModel::step_jacobians(std::span<const double> x, double t, double dt,
                                       std::span<const double> dw) const {
    const int n = dim();
    const int p = n_params();
    ad::Tape tape;
    const std::vector<ad::NodeId> outs = record_step(tape, x, t, dt, dw);
    StepJacobians jac{Matrix(n, n), Matrix(n, p)};
    for (int i = 0; i < n; ++i) {
        const ad::NodeId one_out[1] = {outs[i]};
        const double one_seed[1] = {1.0};
        const std::vector<double> row = ad::vjp(tape, one_out, one_seed);
        for (int j = 0; j < n; ++j) jac.d_state(i, j) = row[j];
        for (int j = 0; j < p; ++j) jac.d_params(i, j) = row[n + j];
    }
    return jac;
}

Matrix SdeModel::diffusion(std::span<const double> x, double t) const {
    const int n = dim();
    Matrix sigma(n, n);
    std::vector<double> e(n, 0.0), col(n);
    for (int j = 0; j < n; ++j) {
        e[j] = 1.0;
        diffusion_dw(x, t, theta_, e, col);
        for (int i = 0; i < n; ++i) sigma(i, j) = col[i];
        e[j] = 0.0;
    }
    return sigma;
}

std::vector<double> uniform_grid(double t_end, int n_steps) {
    if (n_steps < 1 || !(t_end > 0.0)) throw std::invalid_argument("uniform_grid: bad arguments");
    std::vector<double> grid(n_steps + 1);
    for (int k = 0; k <= n_steps; ++k) grid[k] = t_end * k / n_steps;
    return grid;
}

PathRecord simulate_path(const SdeModel& model, std::span<const double> x0,
                         std::span<const double> grid, CounterRng& rng) {
    const int n = model.dim();
    if (x0.size() != static_cast<std::size_t>(n)) {
        throw std::invalid_argument("simulate_path: x0 dimension mismatch");
    }
    if (grid.empty() || grid[0] != 0.0) {
        throw std::invalid_argument("simulate_path: grid must start at 0");
    }
    for (std::size_t k = 1; k < grid.size(); ++k) {
        if (!(grid[k] > grid[k - 1])) {
            throw std::invalid_argument("simulate_path: grid must be strictly increasing");
        }
    }
    const int m = static_cast<int>(grid.size()) - 1;
    PathRecord path;
    path.dim = n;
    path.times.assign(grid.begin(), grid.end());
    path.states.resize(static_cast<std::size_t>(m + 1) * n);
    path.draws.resize(static_cast<std::size_t>(m) * n);
    std::copy(x0.begin(), x0.end(), path.states.begin());

    std::vector<double> dw(n);
    for (int k = 0; k < m; ++k) {
        const double dt = grid[k + 1] - grid[k];
        const double sqrt_dt = std::sqrt(dt);
        std::span<double> eps{path.draws.data() + static_cast<std::size_t>(k) * n,
                              static_cast<std::size_t>(n)};
        rng.fill_normal(eps);
        for (int i = 0; i < n; ++i) dw[i] = eps[i] * sqrt_dt;
        const std::vector<double> next = model.step(path.state(k), grid[k], dt, dw);
        std::copy(next.begin(), next.end(),
                  path.states.begin() + static_cast<std::size_t>(k + 1) * n);
    }
    return path;
}

namespace {

std::vector<double> dw_at(const PathRecord& path, int k) {
    const double dt = path.times[k + 1] - path.times[k];
    const double sqrt_dt = std::sqrt(dt);
    auto eps = path.draw(k);
    std::vector<double> dw(eps.size());
    for (std::size_t i = 0; i < eps.size(); ++i) dw[i] = eps[i] * sqrt_dt;
    return dw;
}

void check_path(const SdeModel& model, const PathRecord& path, const char* where) {
    if (path.dim != model.dim() || path.times.empty()) {
        throw std::invalid_argument(std::string(where) + ": path does not match model");
    }
}

}  // namespace

std::vector<double> tangent_deltas(const SdeModel& model, const PathRecord& path,
                                   const Payoff& payoff) {
    check_path(model, path, "tangent_deltas");
    const int m = path.n_steps();
    Matrix sens = Matrix::identity(model.dim());
    for (int k = 0; k < m; ++k) {
        const double dt = path.times[k + 1] - path.times[k];
        const StepJacobians jac = model.step_jacobians(path.state(k), path.times[k], dt, dw_at(path, k));
        sens = matmul(jac.d_state, sens);
    }
    const std::vector<double> g = payoff.gradient(path.state(m));
    return matvec_transposed(sens, g);
}

std::vector<double> tangent_param_sens(const SdeModel& model, const PathRecord& path,
                                       const Payoff& payoff) {
    check_path(model, path, "tangent_param_sens");
    const int m = path.n_steps();
    const int n = model.dim();
    const int p = model.n_params();
    Matrix psi(n, p);
    for (int k = 0; k < m; ++k) {
        const double dt = path.times[k + 1] - path.times[k];
        const StepJacobians jac = model.step_jacobians(path.state(k), path.times[k], dt, dw_at(path, k));
        Matrix next = matmul(jac.d_state, psi);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < p; ++j) next(i, j) += jac.d_params(i, j);
        psi = std::move(next);
    }
    const std::vector<double> g = payoff.gradient(path.state(m));
    return matvec_transposed(psi, g);
}

PathSens adjoint_sweep(const SdeModel& model, const PathRecord& path, const Payoff& payoff) {
    check_path(model, path, "adjoint_sweep");
    const int m = path.n_steps();
    const int p = model.n_params();
    std::vector<double> v = payoff.gradient(path.state(m));
    if (v.size() != static_cast<std::size_t>(model.dim())) {
        throw std::invalid_argument("adjoint_sweep: payoff gradient dimension mismatch");
    }
    std::vector<double> param_sens(p, 0.0);
    for (int k = m - 1; k >= 0; --k) {
        const double dt = path.times[k + 1] - path.times[k];
        const StepJacobians jac = model.step_jacobians(path.state(k), path.times[k], dt, dw_at(path, k));
        const std::vector<double> contrib = matvec_transposed(jac.d_params, v);
        for (int j = 0; j < p; ++j) param_sens[j] += contrib[j];
        v = matvec_transposed(jac.d_state, v);
    }
    return {std::move(v), std::move(param_sens)};
}

namespace {

struct PerPathBuffers {
    std::vector<double> values;
    std::vector<double> deltas;  // n_paths x N
    std::vector<double> params;  // n_paths x P
};

GreeksResult reduce_paths(const PerPathBuffers& buf, int n, int p, long n_paths,
                          std::uint64_t seed) {
    GreeksResult res;
    res.n_paths = n_paths;
    res.seed = seed;
    const MeanStdErr price = mean_stderr(buf.values);
    res.price = price.mean;
    res.price_se = price.std_error;
    std::vector<double> col(n_paths);
    for (int d = 0; d < n; ++d) {
        for (long i = 0; i < n_paths; ++i) col[i] = buf.deltas[static_cast<std::size_t>(i) * n + d];
        const MeanStdErr ms = mean_stderr(col);
        res.deltas.push_back(ms.mean);
        res.delta_ses.push_back(ms.std_error);
    }
    for (int d = 0; d < p; ++d) {
        for (long i = 0; i < n_paths; ++i) col[i] = buf.params[static_cast<std::size_t>(i) * p + d];
        const MeanStdErr ms = mean_stderr(col);
        res.param_sens.push_back(ms.mean);
        res.param_ses.push_back(ms.std_error);
    }
    return res;
}

template <typename PathBody>
void run_paths_parallel(long n_paths, PathBody&& body) {
    bool failed = false;
    std::string error;
    std::mutex error_mutex;
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n_paths; ++i) {
        try {
            body(i);
        } catch (const std::exception& e) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!failed) error = e.what();
            failed = true;
        }
    }
    if (failed) throw std::runtime_error("path worker failed: " + error);
}

}  // namespace

GreeksResult mc_greeks(const SdeModel& model, std::span<const double> x0, const Payoff& payoff,
                       std::span<const double> grid, long n_paths, std::uint64_t seed) {
    if (n_paths < 1) throw std::invalid_argument("mc_greeks: n_paths must be >= 1");
    const int n = model.dim();
    const int p = model.n_params();
    PerPathBuffers buf;
    buf.values.resize(n_paths);
    buf.deltas.resize(static_cast<std::size_t>(n_paths) * n);
    buf.params.resize(static_cast<std::size_t>(n_paths) * p);

    run_paths_parallel(n_paths, [&](long i) {
        CounterRng rng(seed, static_cast<std::uint64_t>(i));
        const PathRecord path = simulate_path(model, x0, grid, rng);
        buf.values[i] = payoff.value(path.state(path.n_steps()));
        PathSens sens = adjoint_sweep(model, path, payoff);
        std::copy(sens.deltas.begin(), sens.deltas.end(),
                  buf.deltas.begin() + static_cast<std::size_t>(i) * n);
        std::copy(sens.param_sens.begin(), sens.param_sens.end(),
                  buf.params.begin() + static_cast<std::size_t>(i) * p);
    });
    return reduce_paths(buf, n, p, n_paths, seed);
}

GreeksResult mc_greeks_serial(const SdeModel& model, std::span<const double> x0,
                              const Payoff& payoff, std::span<const double> grid, long n_paths,
                              std::uint64_t seed) {
    if (n_paths < 1) throw std::invalid_argument("mc_greeks_serial: n_paths must be >= 1");
    const int n = model.dim();
    const int p = model.n_params();
    PerPathBuffers buf;
    buf.values.resize(n_paths);
    buf.deltas.resize(static_cast<std::size_t>(n_paths) * n);
    buf.params.resize(static_cast<std::size_t>(n_paths) * p);

    for (long i = 0; i < n_paths; ++i) {
        CounterRng rng(seed, static_cast<std::uint64_t>(i));
        const PathRecord path = simulate_path(model, x0, grid, rng);
        buf.values[i] = payoff.value(path.state(path.n_steps()));
        PathSens sens = adjoint_sweep(model, path, payoff);
        std::copy(sens.deltas.begin(), sens.deltas.end(),
                  buf.deltas.begin() + static_cast<std::size_t>(i) * n);
        std::copy(sens.param_sens.begin(), sens.param_sens.end(),
                  buf.params.begin() + static_cast<std::size_t>(i) * p);
    }
    return reduce_paths(buf, n, p, n_paths, seed);
}

// ---------------------------------------------------------------------------
// Presets
// ---------------------------------------------------------------------------

namespace {

class Gbm1D final : public SdeModel {
public:
    Gbm1D(double mu, double nu) : SdeModel(1, {mu, nu}) {}

    std::string name() const override { return "gbm-1d"; }
    std::vector<std::string> param_names() const override { return {"mu", "nu"}; }

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
        const double mu = params()[0];
        const double nu = params()[1];
        StepJacobians jac{Matrix(1, 1), Matrix(1, 2)};
        jac.d_state(0, 0) = 1.0 + mu * dt + nu * dw[0];
        jac.d_params(0, 0) = x[0] * dt;
        jac.d_params(0, 1) = x[0] * dw[0];
        return jac;
    }

private:
    template <typename S>
    void drift_impl(std::span<const S> x, double, std::span<const S> th, std::span<S> out) const {
        out[0] = th[0] * x[0];
    }
    template <typename S>
    void diffusion_impl(std::span<const S> x, double, std::span<const S> th,
                        std::span<const double> dw, std::span<S> out) const {
        out[0] = th[1] * x[0] * dw[0];
    }
};

class Gbm1DFixedDrift final : public SdeModel {
public:
    Gbm1DFixedDrift(double mu, double nu) : SdeModel(1, {nu}), mu_(mu) {}

    std::string name() const override { return "gbm-1d-fixed-drift"; }
    std::vector<std::string> param_names() const override { return {"nu"}; }

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
        const double nu = params()[0];
        StepJacobians jac{Matrix(1, 1), Matrix(1, 1)};
        jac.d_state(0, 0) = 1.0 + mu_ * dt + nu * dw[0];
        jac.d_params(0, 0) = x[0] * dw[0];
        return jac;
    }

private:
    template <typename S>
    void drift_impl(std::span<const S> x, double, std::span<const S>, std::span<S> out) const {
        out[0] = x[0] * mu_;
    }
    template <typename S>
    void diffusion_impl(std::span<const S> x, double, std::span<const S> th,
                        std::span<const double> dw, std::span<S> out) const {
        out[0] = th[0] * x[0] * dw[0];
    }

    double mu_;
};

class GbmBasket final : public SdeModel {
public:
    GbmBasket(int n, double mu, std::vector<double> nus)
        : SdeModel(n, concat(mu, std::move(nus))) {}

    std::string name() const override { return "gbm-basket"; }
    std::vector<std::string> param_names() const override {
        std::vector<std::string> names{"mu"};
        for (int i = 0; i < dim(); ++i) names.push_back("nu" + std::to_string(i));
        return names;
    }

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

private:
    static std::vector<double> concat(double mu, std::vector<double> nus) {
        std::vector<double> th{mu};
        th.insert(th.end(), nus.begin(), nus.end());
        return th;
    }
    template <typename S>
    void drift_impl(std::span<const S> x, double, std::span<const S> th, std::span<S> out) const {
        for (int i = 0; i < dim(); ++i) out[i] = th[0] * x[i];
    }
    template <typename S>
    void diffusion_impl(std::span<const S> x, double, std::span<const S> th,
                        std::span<const double> dw, std::span<S> out) const {
        for (int i = 0; i < dim(); ++i) out[i] = th[1 + i] * x[i] * dw[i];
    }
};

class LocalVolPoly final : public SdeModel {
public:
    LocalVolPoly(double mu, double a, double b, double c) : SdeModel(1, {mu, a, b, c}) {}

    std::string name() const override { return "local-vol-poly"; }
    std::vector<std::string> param_names() const override { return {"mu", "a", "b", "c"}; }

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

private:
    template <typename S>
    void drift_impl(std::span<const S> x, double, std::span<const S> th, std::span<S> out) const {
        out[0] = th[0] * x[0];
    }
    template <typename S>
    void diffusion_impl(std::span<const S> x, double, std::span<const S> th,
                        std::span<const double> dw, std::span<S> out) const {
        out[0] = (th[1] + th[2] * x[0] + th[3] * (x[0] * x[0])) * dw[0];
    }
};

}  // namespace

std::unique_ptr<SdeModel> make_gbm_1d(double mu, double nu) {
    return std::make_unique<Gbm1D>(mu, nu);
}

std::unique_ptr<SdeModel> make_gbm_1d_fixed_drift(double mu, double nu) {
    return std::make_unique<Gbm1DFixedDrift>(mu, nu);
}

std::unique_ptr<SdeModel> make_gbm_basket(int n, double mu, std::vector<double> nus) {
    if (static_cast<int>(nus.size()) != n) {
        throw std::invalid_argument("make_gbm_basket: need one vol per asset");
    }
    return std::make_unique<GbmBasket>(n, mu, std::move(nus));
}

std::unique_ptr<SdeModel> make_local_vol_poly(double mu, double a, double b, double c) {
    return std::make_unique<LocalVolPoly>(mu, a, b, c);
}

}  // namespace adjg::mc
