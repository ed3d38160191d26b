#include "adjg/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <set>
#include <sstream>

#include "json.hpp"

#include "adjg/bench.hpp"
#include "adjg/calibrate.hpp"
#include "adjg/copula.hpp"
#include "adjg/payoff.hpp"
#include "adjg/pde.hpp"
#include "adjg/sde.hpp"
#include "adjg/simple_example.hpp"
#include "adjg/verify.hpp"

namespace adjg::scenario {

using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// Strict JSON access
// ---------------------------------------------------------------------------

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    if (!obj.is_object()) throw ParseError(where + ": expected an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!allowed.count(it.key())) {
            throw ParseError(where + ": unknown key '" + it.key() + "'");
        }
    }
}

const json& need(const json& obj, const std::string& key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) throw ParseError(where + ": missing key '" + key + "'");
    return *it;
}

double need_number(const json& obj, const std::string& key, const std::string& where) {
    const json& v = need(obj, key, where);
    if (!v.is_number()) throw ParseError(where + ": '" + key + "' must be a number");
    return v.get<double>();
}

long need_integer(const json& obj, const std::string& key, const std::string& where) {
    const json& v = need(obj, key, where);
    if (!v.is_number_integer()) throw ParseError(where + ": '" + key + "' must be an integer");
    return v.get<long>();
}

std::string need_string(const json& obj, const std::string& key, const std::string& where) {
    const json& v = need(obj, key, where);
    if (!v.is_string()) throw ParseError(where + ": '" + key + "' must be a string");
    return v.get<std::string>();
}

std::vector<double> need_number_array(const json& obj, const std::string& key,
                                      const std::string& where) {
    const json& v = need(obj, key, where);
    if (!v.is_array()) throw ParseError(where + ": '" + key + "' must be an array");
    std::vector<double> out;
    for (const json& e : v) {
        if (!e.is_number()) throw ParseError(where + ": '" + key + "' must hold numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

double optional_number(const json& obj, const std::string& key, double fallback,
                       const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) return fallback;
    if (!it->is_number()) throw ParseError(where + ": '" + key + "' must be a number");
    return it->get<double>();
}

// ---------------------------------------------------------------------------
// Output helpers
// ---------------------------------------------------------------------------

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_text(const std::filesystem::path& dir, const std::string& filename,
                const std::string& content) {
    std::filesystem::create_directories(dir);
    std::ofstream os(dir / filename, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + (dir / filename).string());
    os << content;
}

json report_to_json(const verify::GradCheckReport& r) {
    return json{{"max_abs_diff", r.max_abs_diff},
                {"max_rel_diff", r.max_rel_diff},
                {"worst_index", r.worst_index},
                {"pass", r.pass},
                {"tolerance", r.tolerance}};
}

// ---------------------------------------------------------------------------
// Shared builders
// ---------------------------------------------------------------------------

Payoff build_payoff(const json& spec, int dim, const std::string& where) {
    const std::string preset = need_string(spec, "preset", where);
    if (preset == "call") {
        check_keys(spec, {"preset", "strike"}, where);
        if (dim != 1) throw ValidationError(where + ": call payoff needs a 1-d state");
        return call_payoff(need_number(spec, "strike", where));
    }
    if (preset == "put") {
        check_keys(spec, {"preset", "strike"}, where);
        if (dim != 1) throw ValidationError(where + ": put payoff needs a 1-d state");
        return put_payoff(need_number(spec, "strike", where));
    }
    if (preset == "basket-call") {
        check_keys(spec, {"preset", "weights", "strike"}, where);
        std::vector<double> w = need_number_array(spec, "weights", where);
        if (static_cast<int>(w.size()) != dim) {
            throw ValidationError(where + ": weights length must match the state dimension");
        }
        return basket_call_payoff(std::move(w), need_number(spec, "strike", where));
    }
    if (preset == "sum") {
        check_keys(spec, {"preset", "weights"}, where);
        std::vector<double> w = need_number_array(spec, "weights", where);
        if (static_cast<int>(w.size()) != dim) {
            throw ValidationError(where + ": weights length must match the state dimension");
        }
        return basket_sum_payoff(std::move(w));
    }
    if (preset == "smooth-power") {
        check_keys(spec, {"preset", "weights", "power", "shift"}, where);
        std::vector<double> w = need_number_array(spec, "weights", where);
        if (static_cast<int>(w.size()) != dim) {
            throw ValidationError(where + ": weights length must match the state dimension");
        }
        return smooth_power_payoff(std::move(w), need_number(spec, "power", where),
                                   optional_number(spec, "shift", 0.0, where));
    }
    if (preset == "min-of") {
        check_keys(spec, {"preset"}, where);
        return min_of_payoff(dim);
    }
    if (preset == "digital" || preset == "digital-call" || preset == "digital-put") {
        throw ValidationError(where +
                              ": digital payoffs are discontinuous (not Lipschitz); pathwise "
                              "differentiation does not apply to them and they are rejected at "
                              "configuration time");
    }
    throw ValidationError(where + ": unknown payoff preset '" + preset + "'");
}

std::unique_ptr<mc::SdeModel> build_model(const std::string& name, const json& params,
                                          const std::string& where) {
    if (name == "gbm-1d") {
        check_keys(params, {"mu", "nu"}, where);
        return mc::make_gbm_1d(need_number(params, "mu", where), need_number(params, "nu", where));
    }
    if (name == "gbm-1d-fixed-drift") {
        check_keys(params, {"mu", "nu"}, where);
        return mc::make_gbm_1d_fixed_drift(need_number(params, "mu", where),
                                           need_number(params, "nu", where));
    }
    if (name == "gbm-basket") {
        check_keys(params, {"n", "mu", "nus"}, where);
        const int n = static_cast<int>(need_integer(params, "n", where));
        std::vector<double> nus = need_number_array(params, "nus", where);
        if (n < 1) throw ValidationError(where + ": basket needs n >= 1");
        if (static_cast<int>(nus.size()) != n) {
            throw ValidationError(where + ": need one vol per asset");
        }
        return mc::make_gbm_basket(n, need_number(params, "mu", where), std::move(nus));
    }
    if (name == "local-vol-poly") {
        check_keys(params, {"mu", "a", "b", "c"}, where);
        return mc::make_local_vol_poly(need_number(params, "mu", where),
                                       need_number(params, "a", where),
                                       need_number(params, "b", where),
                                       need_number(params, "c", where));
    }
    throw ValidationError(where + ": unknown model preset '" + name + "'");
}

double preset_shape(const std::string& name, double s, const std::string& where) {
    if (name == "zero") return 0.0;
    if (name == "one") return 1.0;
    if (name == "gaussian-bump") return std::exp(-20.0 * (s - 0.5) * (s - 0.5));
    if (name == "linear-ramp") return s;
    if (name == "sine") return std::sin(3.14159265358979323846 * s);
    throw ValidationError(where + ": unknown shape preset '" + name + "'");
}

std::function<double(double)> build_bc(const std::string& name, const std::string& where) {
    if (name == "zero") return [](double) { return 0.0; };
    if (name == "one") return [](double) { return 1.0; };
    if (name == "sin-t") return [](double t) { return std::sin(t); };
    throw ValidationError(where + ": unknown boundary preset '" + name + "'");
}

std::unique_ptr<copula::Marginal> build_marginal(const json& spec, const std::string& where) {
    const std::string preset = need_string(spec, "preset", where);
    if (preset == "normal") {
        check_keys(spec, {"preset", "mean", "sd", "param"}, where);
        std::string param = spec.contains("param") ? need_string(spec, "param", where) : "";
        try {
            return copula::make_normal_marginal(need_number(spec, "mean", where),
                                                need_number(spec, "sd", where), param);
        } catch (const std::invalid_argument& e) {
            throw ValidationError(where + ": " + e.what());
        }
    }
    if (preset == "lognormal") {
        check_keys(spec, {"preset", "mu", "sigma", "param"}, where);
        std::string param = spec.contains("param") ? need_string(spec, "param", where) : "";
        try {
            return copula::make_lognormal_marginal(need_number(spec, "mu", where),
                                                   need_number(spec, "sigma", where), param);
        } catch (const std::invalid_argument& e) {
            throw ValidationError(where + ": " + e.what());
        }
    }
    throw ValidationError(where + ": unknown marginal preset '" + preset + "'");
}

// ---------------------------------------------------------------------------
// Scenario kinds
// ---------------------------------------------------------------------------

void run_simple_example(const json& block, const std::filesystem::path& out_dir) {
    const std::string where = "simple-example";
    check_keys(block, {"a", "b", "c", "w0"}, where);
    const double a = need_number(block, "a", where);
    const double b = need_number(block, "b", where);
    const double c = need_number(block, "c", where);
    const double w0 = optional_number(block, "w0", 1.0, where);

    const std::vector<double> rev = simple_example_grad_reverse(a, b, c, w0);
    const std::vector<double> fwd = simple_example_grad_forward(a, b, c, w0);
    const std::vector<double> x{a, b, c};
    const std::vector<double> fd = verify::fd_gradient(
        [w0](std::span<const double> p) { return simple_example_value(p[0], p[1], p[2], w0); }, x);
    const std::vector<double> cstep = verify::complex_step_gradient(
        [w0](std::span<const std::complex<double>> p) {
            return simple_example<std::complex<double>>(p[0], p[1], p[2], w0);
        },
        x);

    std::ostringstream csv;
    csv << "name,value\n";
    const char* names[3] = {"a", "b", "c"};
    for (int i = 0; i < 3; ++i) csv << names[i] << ',' << format_double(rev[i]) << '\n';
    write_text(out_dir, "gradient.csv", csv.str());

    json checks;
    checks["value"] = simple_example_value(a, b, c, w0);
    checks["gradient_reverse"] = rev;
    checks["gradient_forward"] = fwd;
    checks["forward_vs_reverse"] = report_to_json(verify::compare_gradients(rev, fwd, 1e-12));
    checks["reverse_vs_fd"] = report_to_json(verify::compare_gradients(rev, fd, 1e-5));
    checks["reverse_vs_complex_step"] =
        report_to_json(verify::compare_gradients(rev, cstep, 1e-12));
    write_text(out_dir, "checks.json", checks.dump(2) + "\n");
}

void run_pde(const json& block, const std::filesystem::path& out_dir) {
    const std::string where = "pde";
    check_keys(block,
               {"n_space", "n_steps", "dx", "dt", "domain_lo", "initial", "target", "bc_left",
                "bc_right"},
               where);
    const int n = static_cast<int>(need_integer(block, "n_space", where));
    const int m = static_cast<int>(need_integer(block, "n_steps", where));
    const double dx = need_number(block, "dx", where);
    const double dt = need_number(block, "dt", where);
    const double lo = optional_number(block, "domain_lo", 0.0, where);
    const std::string initial = need_string(block, "initial", where);
    const std::string bc_left = need_string(block, "bc_left", where);
    const std::string bc_right = need_string(block, "bc_right", where);

    const double hi = lo + (n - 1) * dx;
    auto shape_on_x = [lo, hi, where](const std::string& name) {
        return [name, lo, hi, where](double x) { return preset_shape(name, (x - lo) / (hi - lo), where); };
    };

    std::vector<double> target(n);
    const json& tgt = need(block, "target", where);
    if (tgt.is_string()) {
        for (int j = 0; j < n; ++j) {
            target[j] = preset_shape(tgt.get<std::string>(), static_cast<double>(j) / (n - 1), where);
        }
    } else {
        target = need_number_array(block, "target", where);
        if (static_cast<int>(target.size()) != n) {
            throw ValidationError(where + ": explicit target must have n_space entries");
        }
    }

    pde::PdeProblem problem;
    try {
        problem = pde::PdeProblem::make(lo, n, dx, m, dt, build_bc(bc_left, where),
                                        build_bc(bc_right, where), shape_on_x(initial),
                                        std::move(target));
    } catch (const std::invalid_argument& e) {
        throw ValidationError(where + ": " + e.what());
    }

    const pde::PdeTrajectory traj = pde::pde_solve(problem);
    const std::vector<double> bar = pde::pde_adjoint(problem, traj);

    std::ostringstream csv;
    csv << "index,x,value\n";
    for (int j = 0; j < n; ++j) {
        csv << j << ',' << format_double(problem.x_at(j)) << ',' << format_double(bar[j]) << '\n';
    }
    write_text(out_dir, "u0_bar.csv", csv.str());

    json summary;
    summary["n_space"] = n;
    summary["n_steps"] = m;
    summary["c"] = problem.c;
    summary["cost"] = pde::pde_cost(traj, problem.target);
    write_text(out_dir, "pde.json", summary.dump(2) + "\n");
}

struct McSdeSetup {
    std::unique_ptr<mc::SdeModel> model;
    std::vector<double> x0;
    Payoff payoff;
    std::vector<double> grid;
    long n_paths = 0;
    std::uint64_t seed = 0;
};

McSdeSetup parse_mc_sde(const json& block, const std::string& where) {
    check_keys(block,
               {"model", "model_params", "x0", "payoff", "t_end", "n_steps", "n_paths", "seed"},
               where);
    McSdeSetup s;
    s.model = build_model(need_string(block, "model", where), need(block, "model_params", where),
                          where);
    s.x0 = need_number_array(block, "x0", where);
    if (static_cast<int>(s.x0.size()) != s.model->dim()) {
        throw ValidationError(where + ": x0 length must match the model dimension");
    }
    s.payoff = build_payoff(need(block, "payoff", where), s.model->dim(), where + ".payoff");
    const double t_end = need_number(block, "t_end", where);
    const long n_steps = need_integer(block, "n_steps", where);
    if (!(t_end > 0.0) || n_steps < 1) {
        throw ValidationError(where + ": need t_end > 0 and n_steps >= 1");
    }
    s.grid = mc::uniform_grid(t_end, static_cast<int>(n_steps));
    s.n_paths = need_integer(block, "n_paths", where);
    if (s.n_paths < 1) throw ValidationError(where + ": n_paths must be >= 1");
    s.seed = static_cast<std::uint64_t>(need_integer(block, "seed", where));
    return s;
}

void run_mc_sde(const json& block, const std::filesystem::path& out_dir) {
    McSdeSetup s = parse_mc_sde(block, "mc-sde");
    const mc::GreeksResult res =
        mc::mc_greeks(*s.model, s.x0, s.payoff, s.grid, s.n_paths, s.seed);

    json out;
    out["price"] = res.price;
    out["price_se"] = res.price_se;
    out["deltas"] = res.deltas;
    out["delta_ses"] = res.delta_ses;
    out["param_sens"] = res.param_sens;
    out["param_ses"] = res.param_ses;
    out["param_names"] = s.model->param_names();
    out["n_paths"] = res.n_paths;
    out["seed"] = res.seed;
    write_text(out_dir, "greeks.json", out.dump(2) + "\n");

    std::ostringstream csv;
    csv << "name,value,std_error\n";
    csv << "price," << format_double(res.price) << ',' << format_double(res.price_se) << '\n';
    for (std::size_t i = 0; i < res.deltas.size(); ++i) {
        csv << "delta" << i << ',' << format_double(res.deltas[i]) << ','
            << format_double(res.delta_ses[i]) << '\n';
    }
    const std::vector<std::string> pnames = s.model->param_names();
    for (std::size_t i = 0; i < res.param_sens.size(); ++i) {
        csv << "sens_" << pnames[i] << ',' << format_double(res.param_sens[i]) << ','
            << format_double(res.param_ses[i]) << '\n';
    }
    write_text(out_dir, "greeks.csv", csv.str());
}

void run_copula(const json& block, const std::filesystem::path& out_dir) {
    const std::string where = "copula";
    check_keys(block, {"names", "rho", "marginals", "payoff", "n_paths", "seed"}, where);
    const int n = static_cast<int>(need_integer(block, "names", where));
    if (n < 2) throw ValidationError(where + ": need at least two names");

    const json& rho_spec = need(block, "rho", where);
    Matrix rho;
    if (rho_spec.is_object() && rho_spec.contains("equicorrelation")) {
        check_keys(rho_spec, {"equicorrelation"}, where + ".rho");
        rho = copula::equicorrelation(n, need_number(rho_spec, "equicorrelation", where + ".rho"));
    } else if (rho_spec.is_object() && rho_spec.contains("matrix")) {
        check_keys(rho_spec, {"matrix"}, where + ".rho");
        const json& rows = rho_spec["matrix"];
        if (!rows.is_array() || static_cast<int>(rows.size()) != n) {
            throw ParseError(where + ".rho: matrix must be an n x n array");
        }
        rho = Matrix(n, n);
        for (int i = 0; i < n; ++i) {
            if (!rows[i].is_array() || static_cast<int>(rows[i].size()) != n) {
                throw ParseError(where + ".rho: matrix must be an n x n array");
            }
            for (int j = 0; j < n; ++j) {
                if (!rows[i][j].is_number()) throw ParseError(where + ".rho: matrix entries must be numbers");
                rho(i, j) = rows[i][j].get<double>();
            }
        }
    } else {
        throw ParseError(where + ".rho: expected 'equicorrelation' or 'matrix'");
    }

    copula::CorrelationModel model;
    try {
        model = copula::CorrelationModel::make(std::move(rho));
    } catch (const std::exception& e) {
        throw ValidationError(where + ": " + e.what());
    }

    const json& marg_spec = need(block, "marginals", where);
    std::vector<std::unique_ptr<copula::Marginal>> own;
    if (marg_spec.is_array()) {
        if (static_cast<int>(marg_spec.size()) != n) {
            throw ValidationError(where + ": need one marginal per name");
        }
        for (const json& m : marg_spec) own.push_back(build_marginal(m, where + ".marginals"));
    } else {
        for (int i = 0; i < n; ++i) own.push_back(build_marginal(marg_spec, where + ".marginals"));
    }
    copula::MarginalSet marginals;
    for (const auto& m : own) marginals.push_back(m.get());

    const Payoff payoff = build_payoff(need(block, "payoff", where), n, where + ".payoff");
    const long n_paths = need_integer(block, "n_paths", where);
    if (n_paths < 1) throw ValidationError(where + ": n_paths must be >= 1");
    const auto seed = static_cast<std::uint64_t>(need_integer(block, "seed", where));

    const copula::CorrRiskResult res = copula::corr_risk(model, marginals, payoff, n_paths, seed);

    std::ostringstream csv;
    csv << "row,col,value\n";
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) {
            csv << i << ',' << j << ',' << format_double(res.rho_bar(i, j)) << '\n';
        }
    write_text(out_dir, "rho_bar.csv", csv.str());

    json out;
    out["price"] = res.price;
    out["std_error"] = res.price_se;
    out["n_paths"] = res.n_paths;
    out["n_excluded"] = res.n_excluded;
    out["seed"] = res.seed;
    write_text(out_dir, "price.json", out.dump(2) + "\n");
}

void run_calibrate(const json& block, const std::filesystem::path& out_dir) {
    const std::string where = "calibrate";
    check_keys(block,
               {"model", "model_params", "x0", "instruments", "theta0", "bounds", "n_paths",
                "seed", "max_iters", "grad_tol"},
               where);
    calib::CalibrationProblem problem;
    problem.model = build_model(need_string(block, "model", where),
                                need(block, "model_params", where), where);
    problem.x0 = need_number_array(block, "x0", where);
    problem.theta0 = need_number_array(block, "theta0", where);

    const json& bounds = need(block, "bounds", where);
    if (!bounds.is_array()) throw ParseError(where + ": bounds must be an array of [lo, hi]");
    for (const json& b : bounds) {
        if (!b.is_array() || b.size() != 2 || !b[0].is_number() || !b[1].is_number()) {
            throw ParseError(where + ": bounds must be an array of [lo, hi]");
        }
        problem.lo.push_back(b[0].get<double>());
        problem.hi.push_back(b[1].get<double>());
    }

    const json& instruments = need(block, "instruments", where);
    if (!instruments.is_array() || instruments.empty()) {
        throw ParseError(where + ": instruments must be a non-empty array");
    }
    for (const json& inst : instruments) {
        const std::string iwhere = where + ".instrument";
        check_keys(inst, {"payoff", "t_end", "n_steps", "market_price"}, iwhere);
        calib::Instrument out;
        out.payoff = build_payoff(need(inst, "payoff", iwhere), problem.model->dim(),
                                  iwhere + ".payoff");
        const double t_end = need_number(inst, "t_end", iwhere);
        const long n_steps = need_integer(inst, "n_steps", iwhere);
        if (!(t_end > 0.0) || n_steps < 1) {
            throw ValidationError(iwhere + ": need t_end > 0 and n_steps >= 1");
        }
        out.grid = mc::uniform_grid(t_end, static_cast<int>(n_steps));
        out.market_price = need_number(inst, "market_price", iwhere);
        problem.instruments.push_back(std::move(out));
    }

    problem.n_paths = need_integer(block, "n_paths", where);
    problem.seed = static_cast<std::uint64_t>(need_integer(block, "seed", where));
    const int max_iters = static_cast<int>(need_integer(block, "max_iters", where));
    const double grad_tol = need_number(block, "grad_tol", where);

    try {
        problem.validate();
    } catch (const std::invalid_argument& e) {
        throw ValidationError(where + ": " + e.what());
    }

    const calib::CalibrationResult res = calib::calibrate(problem, max_iters, grad_tol);

    json out;
    out["theta_star"] = res.theta_star;
    out["param_names"] = problem.model->param_names();
    out["iterations"] = res.iterations;
    out["converged"] = res.converged;
    out["cost_history"] = res.cost_history;
    out["grad_norm_history"] = res.grad_norm_history;
    write_text(out_dir, "calibration.json", out.dump(2) + "\n");

    std::ostringstream csv;
    csv << "iteration,cost,grad_norm\n";
    for (std::size_t i = 0; i < res.cost_history.size(); ++i) {
        csv << i << ',' << format_double(res.cost_history[i]) << ','
            << format_double(res.grad_norm_history[i]) << '\n';
    }
    write_text(out_dir, "cost_history.csv", csv.str());
}

void run_bench(const json& block, const std::filesystem::path& out_dir) {
    const std::string where = "bench";
    check_keys(block, {"which", "sizes", "names", "params", "n_paths", "n_steps"}, where);
    const std::string which = need_string(block, "which", where);
    bench::BenchReport report;
    if (which == "cheap-gradient") {
        const std::vector<double> raw = need_number_array(block, "sizes", where);
        std::vector<int> sizes(raw.begin(), raw.end());
        for (int s : sizes)
            if (s < 1) throw ValidationError(where + ": sizes must be >= 1");
        report = bench::bench_cheap_gradient(sizes);
    } else if (which == "copula") {
        const std::vector<double> raw = need_number_array(block, "names", where);
        std::vector<int> names(raw.begin(), raw.end());
        for (int s : names)
            if (s < 2) throw ValidationError(where + ": names must be >= 2");
        report = bench::bench_copula_speedup(names);
    } else if (which == "threads") {
        const long n_paths = need_integer(block, "n_paths", where);
        const long n_steps = need_integer(block, "n_steps", where);
        if (n_paths < 1 || n_steps < 1) throw ValidationError(where + ": need n_paths, n_steps >= 1");
        report = bench::bench_mc_threads(n_paths, static_cast<int>(n_steps));
    } else if (which == "sde-params") {
        const std::vector<double> raw = need_number_array(block, "params", where);
        std::vector<int> counts(raw.begin(), raw.end());
        for (int p : counts)
            if (p < 1) throw ValidationError(where + ": params must be >= 1");
        report = bench::bench_sde_param_scaling(counts);
    } else {
        throw ValidationError(where + ": unknown bench '" + which + "'");
    }
    write_text(out_dir, "bench.json", report.to_json() + "\n");
    write_text(out_dir, "bench.csv", report.to_csv());
}

json load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ParseError("cannot open config file " + path);
    json cfg;
    try {
        cfg = json::parse(is);
    } catch (const json::exception& e) {
        throw ParseError(std::string("config is not valid JSON: ") + e.what());
    }
    return cfg;
}

void emit_error_record(const std::string& stage, const std::string& message) {
    json record;
    record["error"] = {{"stage", stage}, {"message", message}};
    std::cerr << record.dump() << '\n';
}

}  // namespace

std::string config_kind(const std::string& config_path) {
    const json cfg = load_config(config_path);
    return need_string(cfg, "kind", "config");
}

int run_scenario(const std::string& config_path) {
    try {
        const json cfg = load_config(config_path);
        const std::string kind = need_string(cfg, "kind", "config");
        static const std::set<std::string> kinds{"simple-example", "pde",       "mc-sde",
                                                 "copula",         "calibrate", "bench"};
        if (!kinds.count(kind)) throw ParseError("config: unknown kind '" + kind + "'");
        check_keys(cfg, {"kind", "output_dir", kind}, "config");
        const std::filesystem::path out_dir = need_string(cfg, "output_dir", "config");
        const json& block = need(cfg, kind, "config");

        if (kind == "simple-example") run_simple_example(block, out_dir);
        else if (kind == "pde") run_pde(block, out_dir);
        else if (kind == "mc-sde") run_mc_sde(block, out_dir);
        else if (kind == "copula") run_copula(block, out_dir);
        else if (kind == "calibrate") run_calibrate(block, out_dir);
        else run_bench(block, out_dir);
        return kExitOk;
    } catch (const ParseError& e) {
        emit_error_record("parse", e.what());
        return kExitParse;
    } catch (const ValidationError& e) {
        emit_error_record("validation", e.what());
        return kExitValidation;
    } catch (const std::exception& e) {
        emit_error_record("runtime", e.what());
        return kExitRuntime;
    }
}

std::string describe_output(const std::string& kind) {
    if (kind == "simple-example") {
        return "simple-example outputs:\n"
               "  gradient.csv   columns name,value - reverse-mode gradient entry per input (a, b, c)\n"
               "  checks.json    value, both gradients, and gradient comparison reports\n"
               "                 (forward vs reverse, reverse vs finite differences, reverse vs\n"
               "                 complex step), each with max_abs_diff/max_rel_diff/worst_index/pass\n";
    }
    if (kind == "pde") {
        return "pde outputs:\n"
               "  u0_bar.csv     columns index,x,value - cost gradient per initial-condition node\n"
               "  pde.json       n_space, n_steps, c, and the terminal cost\n";
    }
    if (kind == "mc-sde") {
        return "mc-sde outputs:\n"
               "  greeks.json    price, deltas, param_sens with standard errors, param_names,\n"
               "                 n_paths, seed\n"
               "  greeks.csv     columns name,value,std_error - rows: price, delta<i> per state\n"
               "                 dimension, sens_<param> per model parameter\n";
    }
    if (kind == "copula") {
        return "copula outputs:\n"
               "  rho_bar.csv    columns row,col,value - averaged correlation sensitivities on the\n"
               "                 lower triangle; a strict-lower entry is the derivative when the\n"
               "                 symmetric pair moves together\n"
               "  price.json     price, std_error, n_paths, n_excluded, seed\n";
    }
    if (kind == "calibrate") {
        return "calibrate outputs:\n"
               "  calibration.json  theta_star, param_names, iterations, converged, cost_history,\n"
               "                    grad_norm_history\n"
               "  cost_history.csv  columns iteration,cost,grad_norm - accepted iterates only\n";
    }
    if (kind == "bench") {
        return "bench outputs:\n"
               "  bench.json     timestamp, repetitions, rows\n"
               "  bench.csv      columns case,n_inputs,primal_time,gradient_time,ratio; times are\n"
               "                 medians in seconds, ratio = gradient_time/primal_time (for the\n"
               "                 copula bench: tangent loop over adjoint sweep; for the threads\n"
               "                 bench: serial over parallel)\n";
    }
    throw ValidationError("describe_output: unknown kind '" + kind + "'");
}

}  // namespace adjg::scenario
