#include "adjg/copula.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <mutex>

#include "adjg/normal.hpp"
#include "adjg/rng.hpp"
#include "adjg/stats.hpp"

namespace adjg::copula {

namespace {

constexpr double kUniformClamp = 1e-12;
constexpr double kPdfFloor = 1e-300;

// Paths are summed per fixed-size block, blocks combined in order, so the
// accumulation order is independent of how blocks are scheduled on threads.
constexpr long kBlockSize = 256;

}  // namespace

Matrix cholesky(const Matrix& rho) {
    const int n = rho.rows();
    if (rho.cols() != n) throw std::invalid_argument("cholesky: matrix must be square");
    Matrix c(n, n);
    for (int j = 0; j < n; ++j) {
        double d = rho(j, j);
        for (int k = 0; k < j; ++k) d -= c(j, k) * c(j, k);
        if (!(d > 0.0)) {
            throw NotPositiveDefinite(j, "cholesky: leading minor " + std::to_string(j + 1) +
                                             " is not positive definite");
        }
        c(j, j) = std::sqrt(d);
        for (int i = j + 1; i < n; ++i) {
            double s = rho(i, j);
            for (int k = 0; k < j; ++k) s -= c(i, k) * c(j, k);
            c(i, j) = s / c(j, j);
        }
    }
    return c;
}

Matrix cholesky_tangent(const Matrix& chol, const Matrix& drho) {
    const int n = chol.rows();
    if (drho.rows() != n || drho.cols() != n) {
        throw std::invalid_argument("cholesky_tangent: dimension mismatch");
    }
    Matrix dc(n, n);
    for (int j = 0; j < n; ++j) {
        double dd = drho(j, j);
        for (int k = 0; k < j; ++k) dd -= 2.0 * dc(j, k) * chol(j, k);
        dc(j, j) = dd / (2.0 * chol(j, j));
        for (int i = j + 1; i < n; ++i) {
            double ds = drho(i, j);
            for (int k = 0; k < j; ++k) ds -= dc(i, k) * chol(j, k) + chol(i, k) * dc(j, k);
            dc(i, j) = (ds - chol(i, j) * dc(j, j)) / chol(j, j);
        }
    }
    return dc;
}

Matrix cholesky_adjoint(const Matrix& chol, const Matrix& cbar) {
    const int n = chol.rows();
    if (cbar.rows() != n || cbar.cols() != n) {
        throw std::invalid_argument("cholesky_adjoint: dimension mismatch");
    }
    for (int j = 0; j < n; ++j) {
        if (chol(j, j) == 0.0) throw std::invalid_argument("cholesky_adjoint: singular diagonal");
    }
    // Unblocked reverse of the factorization loop; only the lower triangle of
    // cbar is consumed.
    Matrix out(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) out(i, j) = cbar(i, j);

    for (int k = n - 1; k >= 0; --k) {
        for (int j = k + 1; j < n; ++j) {
            for (int i = j; i < n; ++i) {
                out(i, k) -= out(i, j) * chol(j, k);
                out(j, k) -= out(i, j) * chol(i, k);
            }
        }
        for (int j = k + 1; j < n; ++j) {
            out(j, k) /= chol(k, k);
            out(k, k) -= chol(j, k) * out(j, k);
        }
        out(k, k) /= 2.0 * chol(k, k);
    }
    return out;
}

CorrelationModel CorrelationModel::make(Matrix rho) {
    const int n = rho.rows();
    if (rho.cols() != n || n < 1) throw std::invalid_argument("CorrelationModel: matrix must be square");
    for (int i = 0; i < n; ++i) {
        if (std::abs(rho(i, i) - 1.0) > 1e-12) {
            throw std::invalid_argument("CorrelationModel: diagonal entry " + std::to_string(i) +
                                        " is not 1");
        }
        for (int j = 0; j < i; ++j) {
            if (std::abs(rho(i, j) - rho(j, i)) > 1e-12) {
                throw std::invalid_argument("CorrelationModel: matrix is not symmetric");
            }
        }
    }
    Matrix c = cholesky(rho);
    return {std::move(rho), std::move(c)};
}

Matrix equicorrelation(int n, double r) {
    Matrix rho(n, n, r);
    for (int i = 0; i < n; ++i) rho(i, i) = 1.0;
    return rho;
}

Matrix random_correlation(int n, std::uint64_t seed) {
    CounterRng rng(seed);
    Matrix b(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) b(i, j) = rng.next_normal();
    Matrix a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) {
            double s = (i == j) ? 0.5 * n : 0.0;  // ridge keeps the minors well away from zero
            for (int k = 0; k < n; ++k) s += b(i, k) * b(j, k);
            a(i, j) = s;
            a(j, i) = s;
        }
    Matrix rho(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) rho(i, j) = a(i, j) / std::sqrt(a(i, i) * a(j, j));
    return rho;
}

// ---------------------------------------------------------------------------
// Marginals
// ---------------------------------------------------------------------------

namespace {

enum class NormalParam { none, mean, sd };

class NormalMarginal final : public Marginal {
public:
    NormalMarginal(double mean, double sd, NormalParam which) : mean_(mean), sd_(sd), which_(which) {
        if (!(sd > 0.0)) throw std::invalid_argument("normal marginal: sd must be positive");
    }
    double cdf(double x) const override { return norm_cdf((x - mean_) / sd_); }
    double pdf(double x) const override { return norm_pdf((x - mean_) / sd_) / sd_; }
    double inv_cdf(double u) const override { return mean_ + sd_ * norm_inv_cdf(u); }
    bool has_param() const override { return which_ != NormalParam::none; }
    double dcdf_dparam(double x) const override {
        const double xi = (x - mean_) / sd_;
        switch (which_) {
            case NormalParam::mean: return -norm_pdf(xi) / sd_;
            case NormalParam::sd: return -norm_pdf(xi) * xi / sd_;
            default: return Marginal::dcdf_dparam(x);
        }
    }

private:
    double mean_, sd_;
    NormalParam which_;
};

enum class LognormalParam { none, mu, sigma };

class LognormalMarginal final : public Marginal {
public:
    LognormalMarginal(double mu, double sigma, LognormalParam which)
        : mu_(mu), sigma_(sigma), which_(which) {
        if (!(sigma > 0.0)) throw std::invalid_argument("lognormal marginal: sigma must be positive");
    }
    double cdf(double x) const override {
        if (x <= 0.0) return 0.0;
        return norm_cdf((std::log(x) - mu_) / sigma_);
    }
    double pdf(double x) const override {
        if (x <= 0.0) return 0.0;
        return norm_pdf((std::log(x) - mu_) / sigma_) / (x * sigma_);
    }
    double inv_cdf(double u) const override { return std::exp(mu_ + sigma_ * norm_inv_cdf(u)); }
    bool has_param() const override { return which_ != LognormalParam::none; }
    double dcdf_dparam(double x) const override {
        const double xi = (std::log(x) - mu_) / sigma_;
        switch (which_) {
            case LognormalParam::mu: return -norm_pdf(xi) / sigma_;
            case LognormalParam::sigma: return -norm_pdf(xi) * xi / sigma_;
            default: return Marginal::dcdf_dparam(x);
        }
    }

private:
    double mu_, sigma_;
    LognormalParam which_;
};

}  // namespace

std::unique_ptr<Marginal> make_normal_marginal(double mean, double sd,
                                               const std::string& which_param) {
    NormalParam which = NormalParam::none;
    if (which_param == "mean") which = NormalParam::mean;
    else if (which_param == "sd") which = NormalParam::sd;
    else if (!which_param.empty())
        throw std::invalid_argument("normal marginal: unknown parameter " + which_param);
    return std::make_unique<NormalMarginal>(mean, sd, which);
}

std::unique_ptr<Marginal> make_lognormal_marginal(double mu, double sigma,
                                                  const std::string& which_param) {
    LognormalParam which = LognormalParam::none;
    if (which_param == "mu") which = LognormalParam::mu;
    else if (which_param == "sigma") which = LognormalParam::sigma;
    else if (!which_param.empty())
        throw std::invalid_argument("lognormal marginal: unknown parameter " + which_param);
    return std::make_unique<LognormalMarginal>(mu, sigma, which);
}

// ---------------------------------------------------------------------------
// Sampling chain and per-path sensitivities
// ---------------------------------------------------------------------------

namespace {

void check_setup(const CorrelationModel& model, const MarginalSet& marginals) {
    if (static_cast<int>(marginals.size()) != model.names()) {
        throw std::invalid_argument("copula: need one marginal per name");
    }
}

double pdf_or_throw(const Marginal& marginal, double x, int i) {
    const double p = marginal.pdf(x);
    if (p < kPdfFloor) {
        throw PdfUnderflow("marginal pdf underflow at component " + std::to_string(i));
    }
    return p;
}

}  // namespace

CopulaPathWork copula_sample(const CorrelationModel& model, const MarginalSet& marginals,
                             std::span<const double> xi) {
    check_setup(model, marginals);
    const int n = model.names();
    if (xi.size() != static_cast<std::size_t>(n)) {
        throw std::invalid_argument("copula_sample: xi dimension mismatch");
    }
    CopulaPathWork w;
    w.xi.assign(xi.begin(), xi.end());
    w.z.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int j = 0; j <= i; ++j) s += model.chol(i, j) * xi[j];
        w.z[i] = s;
    }
    w.u.resize(n);
    w.x.resize(n);
    for (int i = 0; i < n; ++i) {
        w.u[i] = std::clamp(norm_cdf(w.z[i]), kUniformClamp, 1.0 - kUniformClamp);
        w.x[i] = marginals[i]->inv_cdf(w.u[i]);
    }
    return w;
}

double tangent_corr_sens(const CorrelationModel& model, const MarginalSet& marginals,
                         const Payoff& payoff, int l, int k, const CopulaPathWork& work) {
    check_setup(model, marginals);
    const int n = model.names();
    if (!(l > k && l < n && k >= 0)) {
        throw std::invalid_argument("tangent_corr_sens: need a strict lower entry (l > k)");
    }
    Matrix drho(n, n);
    drho(l, k) = 1.0;
    drho(k, l) = 1.0;
    const Matrix dc = cholesky_tangent(model.chol, drho);

    const std::vector<double> grad = payoff.gradient(work.x);
    double p_dot = 0.0;
    for (int i = 0; i < n; ++i) {
        double z_dot = 0.0;
        for (int j = 0; j <= i; ++j) z_dot += dc(i, j) * work.xi[j];
        const double u_dot = norm_pdf(work.z[i]) * z_dot;
        const double x_dot = u_dot / pdf_or_throw(*marginals[i], work.x[i], i);
        p_dot += grad[i] * x_dot;
    }
    return p_dot;
}

PathCorrSens adjoint_corr_sens(const CorrelationModel& model, const MarginalSet& marginals,
                               const Payoff& payoff, const CopulaPathWork& work) {
    check_setup(model, marginals);
    const int n = model.names();
    const std::vector<double> xbar = payoff.gradient(work.x);
    Matrix cbar(n, n);
    for (int i = 0; i < n; ++i) {
        const double ubar = xbar[i] / pdf_or_throw(*marginals[i], work.x[i], i);
        const double zbar = ubar * norm_pdf(work.z[i]);
        for (int j = 0; j <= i; ++j) cbar(i, j) = zbar * work.xi[j];
    }
    return {cholesky_adjoint(model.chol, cbar), std::move(cbar)};
}

double marginal_param_sens(const MarginalSet& marginals, const Payoff& payoff,
                           const CopulaPathWork& work, int j) {
    if (j < 0 || j >= static_cast<int>(marginals.size())) {
        throw std::invalid_argument("marginal_param_sens: bad marginal index");
    }
    if (!marginals[j]->has_param()) {
        throw std::invalid_argument("marginal_param_sens: marginal " + std::to_string(j) +
                                    " carries no parameter");
    }
    const double x_dot =
        -marginals[j]->dcdf_dparam(work.x[j]) / pdf_or_throw(*marginals[j], work.x[j], j);
    return payoff.gradient(work.x)[j] * x_dot;
}

// ---------------------------------------------------------------------------
// Monte Carlo drivers
// ---------------------------------------------------------------------------

namespace {

CopulaPathWork sample_for_path(const CorrelationModel& model, const MarginalSet& marginals,
                               std::uint64_t seed, long path_index) {
    CounterRng rng(seed, static_cast<std::uint64_t>(path_index));
    std::vector<double> xi(model.names());
    rng.fill_normal(xi);
    return copula_sample(model, marginals, xi);
}

template <typename BlockBody>
void run_blocks(long n_blocks, bool parallel, BlockBody&& body) {
    if (parallel) {
        bool failed = false;
        std::string error;
        std::mutex error_mutex;
#pragma omp parallel for schedule(static)
        for (long b = 0; b < n_blocks; ++b) {
            try {
                body(b);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!failed) error = e.what();
                failed = true;
            }
        }
        if (failed) throw std::runtime_error("copula block worker failed: " + error);
    } else {
        for (long b = 0; b < n_blocks; ++b) body(b);
    }
}

PriceResult price_impl(const CorrelationModel& model, const MarginalSet& marginals,
                       const Payoff& payoff, long n_paths, std::uint64_t seed, bool parallel) {
    check_setup(model, marginals);
    if (n_paths < 1) throw std::invalid_argument("copula price: n_paths must be >= 1");
    std::vector<double> values(n_paths);
    const long n_blocks = (n_paths + kBlockSize - 1) / kBlockSize;
    run_blocks(n_blocks, parallel, [&](long b) {
        const long lo = b * kBlockSize;
        const long hi = std::min(n_paths, lo + kBlockSize);
        for (long i = lo; i < hi; ++i) {
            values[i] = payoff.value(sample_for_path(model, marginals, seed, i).x);
        }
    });
    const MeanStdErr ms = mean_stderr(values);
    return {ms.mean, ms.std_error, n_paths, seed};
}

CorrRiskResult corr_risk_impl(const CorrelationModel& model, const MarginalSet& marginals,
                              const Payoff& payoff, long n_paths, std::uint64_t seed,
                              bool parallel) {
    check_setup(model, marginals);
    if (n_paths < 1) throw std::invalid_argument("corr_risk: n_paths must be >= 1");
    const int n = model.names();
    const long n_blocks = (n_paths + kBlockSize - 1) / kBlockSize;

    std::vector<double> values(n_paths);
    std::vector<Matrix> block_sums(n_blocks, Matrix(n, n));
    std::vector<long> block_excluded(n_blocks, 0);

    run_blocks(n_blocks, parallel, [&](long b) {
        const long lo = b * kBlockSize;
        const long hi = std::min(n_paths, lo + kBlockSize);
        Matrix& acc = block_sums[b];
        for (long i = lo; i < hi; ++i) {
            const CopulaPathWork work = sample_for_path(model, marginals, seed, i);
            values[i] = payoff.value(work.x);
            try {
                const PathCorrSens sens = adjoint_corr_sens(model, marginals, payoff, work);
                for (int r = 0; r < n; ++r)
                    for (int c = 0; c <= r; ++c) acc(r, c) += sens.rho_bar(r, c);
            } catch (const PdfUnderflow&) {
                ++block_excluded[b];
            }
        }
    });

    CorrRiskResult res;
    res.n_paths = n_paths;
    res.seed = seed;
    res.rho_bar = Matrix(n, n);
    for (long b = 0; b < n_blocks; ++b) {
        res.n_excluded += block_excluded[b];
        for (int r = 0; r < n; ++r)
            for (int c = 0; c <= r; ++c) res.rho_bar(r, c) += block_sums[b](r, c);
    }
    const long included = n_paths - res.n_excluded;
    if (res.n_excluded > 0) {
        std::cerr << "warning: corr_risk excluded " << res.n_excluded
                  << " path(s) from the sensitivity average (marginal pdf underflow)\n";
    }
    if (included > 0) {
        for (int r = 0; r < n; ++r)
            for (int c = 0; c <= r; ++c) res.rho_bar(r, c) /= static_cast<double>(included);
    }
    const MeanStdErr ms = mean_stderr(values);
    res.price = ms.mean;
    res.price_se = ms.std_error;
    return res;
}

}  // namespace

PriceResult price(const CorrelationModel& model, const MarginalSet& marginals,
                  const Payoff& payoff, long n_paths, std::uint64_t seed) {
    return price_impl(model, marginals, payoff, n_paths, seed, true);
}

PriceResult price_serial(const CorrelationModel& model, const MarginalSet& marginals,
                         const Payoff& payoff, long n_paths, std::uint64_t seed) {
    return price_impl(model, marginals, payoff, n_paths, seed, false);
}

CorrRiskResult corr_risk(const CorrelationModel& model, const MarginalSet& marginals,
                         const Payoff& payoff, long n_paths, std::uint64_t seed) {
    return corr_risk_impl(model, marginals, payoff, n_paths, seed, true);
}

CorrRiskResult corr_risk_serial(const CorrelationModel& model, const MarginalSet& marginals,
                                const Payoff& payoff, long n_paths, std::uint64_t seed) {
    return corr_risk_impl(model, marginals, payoff, n_paths, seed, false);
}

}  // namespace adjg::copula
