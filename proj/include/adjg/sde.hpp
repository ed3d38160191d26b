#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "adjg/linalg.hpp"
#include "adjg/payoff.hpp"
#include "adjg/rng.hpp"
#include "adjg/tape.hpp"

namespace adjg::mc {

struct StepJacobians {
    Matrix d_state;   // N x N, derivative of the step map w.r.t. the state
    Matrix d_params;  // N x P, derivative of the step map w.r.t. the parameters
};

// Euler-Maruyama step map x -> x + a(x,t) dt + sigma(x,t) dW together with its
// Jacobians. Models implement drift and the diffusion action in both plain
// and taped scalars; the taped flavour backs the default Jacobians, and
// models with cheap closed forms override step_jacobians directly.
class SdeModel {
public:
    virtual ~SdeModel() = default;

    int dim() const { return dim_; }
    int n_params() const { return static_cast<int>(theta_.size()); }
    std::span<const double> params() const { return theta_; }
    void set_params(std::span<const double> theta);

    virtual std::string name() const = 0;
    virtual std::vector<std::string> param_names() const;

    // One step of the scheme on plain numbers.
    std::vector<double> step(std::span<const double> x, double t, double dt,
                             std::span<const double> dw) const;

    // Jacobians of the step w.r.t. state and parameters at the same point.
    // Default: record the step on a tape and run one backward pass per row.
    virtual StepJacobians step_jacobians(std::span<const double> x, double t, double dt,
                                         std::span<const double> dw) const;

    // Records the step map on `tape` with x and theta as inputs; used by the
    // default Jacobians and by the verification battery.
    std::vector<ad::NodeId> record_step(ad::Tape& tape, std::span<const double> x, double t,
                                        double dt, std::span<const double> dw) const;

    virtual void drift(std::span<const double> x, double t, std::span<const double> theta,
                       std::span<double> out) const = 0;
    virtual void drift(std::span<const ad::Var> x, double t, std::span<const ad::Var> theta,
                       std::span<ad::Var> out) const = 0;

    // out = sigma(x, t) * dw.
    virtual void diffusion_dw(std::span<const double> x, double t, std::span<const double> theta,
                              std::span<const double> dw, std::span<double> out) const = 0;
    virtual void diffusion_dw(std::span<const ad::Var> x, double t, std::span<const ad::Var> theta,
                              std::span<const double> dw, std::span<ad::Var> out) const = 0;

    // Full diffusion matrix, assembled column by column from diffusion_dw.
    Matrix diffusion(std::span<const double> x, double t) const;

protected:
    SdeModel(int dim, std::vector<double> theta) : dim_(dim), theta_(std::move(theta)) {}

private:
    int dim_;
    std::vector<double> theta_;
};

struct PathRecord {
    int dim = 0;
    std::vector<double> times;   // M+1 grid points
    std::vector<double> states;  // (M+1) x N row-major
    std::vector<double> draws;   // M x N standard normal draws (epsilon)

    int n_steps() const { return static_cast<int>(times.size()) - 1; }
    std::span<const double> state(int k) const {
        return {states.data() + static_cast<std::size_t>(k) * dim, static_cast<std::size_t>(dim)};
    }
    std::span<const double> draw(int k) const {
        return {draws.data() + static_cast<std::size_t>(k) * dim, static_cast<std::size_t>(dim)};
    }
};

struct GreeksResult {
    double price = 0.0;
    double price_se = 0.0;
    std::vector<double> deltas;
    std::vector<double> delta_ses;
    std::vector<double> param_sens;
    std::vector<double> param_ses;
    long n_paths = 0;
    std::uint64_t seed = 0;
};

struct PathSens {
    std::vector<double> deltas;
    std::vector<double> param_sens;
};

// Simulates one path on the grid (strictly increasing, starting at 0), storing
// every state and draw so the backward sweep can replay the step Jacobians.
PathRecord simulate_path(const SdeModel& model, std::span<const double> x0,
                         std::span<const double> grid, CounterRng& rng);

// Reference tangent recursion: propagates the full N x N state sensitivity
// matrix forward (matrix-matrix products) and contracts with the payoff
// gradient at the end.
std::vector<double> tangent_deltas(const SdeModel& model, const PathRecord& path,
                                   const Payoff& payoff);

// Tangent recursion for parameter sensitivities (N x P matrix forward).
std::vector<double> tangent_param_sens(const SdeModel& model, const PathRecord& path,
                                       const Payoff& payoff);

// Backward sweep: matrix-vector products only. Deltas and all parameter
// sensitivities from one pass over the stored path.
PathSens adjoint_sweep(const SdeModel& model, const PathRecord& path, const Payoff& payoff);

// Monte Carlo aggregation over paths with per-path streams derived from
// (seed, path index); per-path results are reduced in path order so the
// output is bit-identical for any thread count.
GreeksResult mc_greeks(const SdeModel& model, std::span<const double> x0, const Payoff& payoff,
                       std::span<const double> grid, long n_paths, std::uint64_t seed);

// Plain-loop reference used to validate the parallel engine.
GreeksResult mc_greeks_serial(const SdeModel& model, std::span<const double> x0,
                              const Payoff& payoff, std::span<const double> grid, long n_paths,
                              std::uint64_t seed);

std::vector<double> uniform_grid(double t_end, int n_steps);

// ---------------------------------------------------------------------------
// Model presets
// ---------------------------------------------------------------------------

// dX = mu X dt + nu X dW, theta = (mu, nu). Analytic step Jacobians.
std::unique_ptr<SdeModel> make_gbm_1d(double mu, double nu);

// Same dynamics with the drift held fixed; theta = (nu). For calibration
// problems that are well-posed in the volatility alone.
std::unique_ptr<SdeModel> make_gbm_1d_fixed_drift(double mu, double nu);

// n independent lognormal assets, theta = (mu, nu_1..nu_n). Taped Jacobians.
std::unique_ptr<SdeModel> make_gbm_basket(int n, double mu, std::vector<double> nus);

// dX = mu X dt + (a + b X + c X^2) dW, theta = (mu, a, b, c). Taped Jacobians.
std::unique_ptr<SdeModel> make_local_vol_poly(double mu, double a, double b, double c);

}  // namespace adjg::mc
