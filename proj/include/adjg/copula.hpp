#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "adjg/linalg.hpp"
#include "adjg/payoff.hpp"

namespace adjg::copula {

class NotPositiveDefinite : public std::runtime_error {
public:
    NotPositiveDefinite(int minor_index, const std::string& what)
        : std::runtime_error(what), minor_index_(minor_index) {}
    int minor_index() const { return minor_index_; }

private:
    int minor_index_;
};

// Lower-triangular factor C with C C^T = rho. Throws NotPositiveDefinite with
// the failing leading-minor index.
Matrix cholesky(const Matrix& rho);

// Forward differential of the factorization: dC for a symmetric perturbation
// drho of the input, by differentiating the recurrence term by term.
Matrix cholesky_tangent(const Matrix& chol, const Matrix& drho);

// Reverse-mode counterpart (unblocked reverse of the factorization loop, after
// Smith 1995): given C and an adjoint C_bar, returns the lower-triangular
// rho_bar whose strict-lower entry (l,k) is the sensitivity when rho_lk and
// rho_kl move together, and whose diagonal entries are plain diagonal
// sensitivities. Duality: lower_inner(rho_bar, drho) == frobenius(C_bar, dC).
Matrix cholesky_adjoint(const Matrix& chol, const Matrix& cbar);

struct CorrelationModel {
    Matrix rho;
    Matrix chol;

    // Validates symmetry, unit diagonal and positive definiteness.
    static CorrelationModel make(Matrix rho);
    int names() const { return rho.rows(); }
};

Matrix equicorrelation(int n, double r);

// Random well-conditioned correlation matrix (normalized Gram matrix with a
// ridge); handy for checks and tests.
Matrix random_correlation(int n, std::uint64_t seed);

// Marginal distribution of one component. `dcdf_dparam` is the derivative of
// the CDF in the marginal's designated scalar parameter, present only for
// marginals configured with one.
class Marginal {
public:
    virtual ~Marginal() = default;
    virtual double cdf(double x) const = 0;
    virtual double pdf(double x) const = 0;
    virtual double inv_cdf(double u) const = 0;
    virtual bool has_param() const { return false; }
    virtual double dcdf_dparam(double /*x*/) const {
        throw std::logic_error("marginal carries no parameter");
    }
};

// which_param: "" (none), "mean"/"sd" for normal, "mu"/"sigma" for lognormal.
std::unique_ptr<Marginal> make_normal_marginal(double mean, double sd,
                                               const std::string& which_param = "");
std::unique_ptr<Marginal> make_lognormal_marginal(double mu, double sigma,
                                                  const std::string& which_param = "");

using MarginalSet = std::vector<const Marginal*>;

// One path of the sampling chain: independent normals Xi, correlated normals
// Z = C Xi, uniforms U = Phi(Z) (clamped away from 0 and 1), and components
// X_i = inv_cdf_i(U_i).
struct CopulaPathWork {
    std::vector<double> xi, z, u, x;
};

class PdfUnderflow : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

CopulaPathWork copula_sample(const CorrelationModel& model, const MarginalSet& marginals,
                             std::span<const double> xi);

// Per-path derivative of the payoff in the correlation entry (l,k), l > k,
// with rho_lk and rho_kl moving together: forward-differentiates the
// factorization along the symmetrized unit direction and chains through the
// sampling steps.
double tangent_corr_sens(const CorrelationModel& model, const MarginalSet& marginals,
                         const Payoff& payoff, int l, int k, const CopulaPathWork& work);

struct PathCorrSens {
    Matrix rho_bar;  // lower-triangular, both-move convention
    Matrix c_bar;    // adjoint of the factor itself (lower triangle)
};

// Per-path reverse chain: payoff adjoint -> U -> Z -> C_bar = Z_bar Xi^T ->
// rho_bar via cholesky_adjoint. All correlation entries from one sweep.
PathCorrSens adjoint_corr_sens(const CorrelationModel& model, const MarginalSet& marginals,
                               const Payoff& payoff, const CopulaPathWork& work);

// Per-path sensitivity to marginal j's parameter, with U_j held fixed.
double marginal_param_sens(const MarginalSet& marginals, const Payoff& payoff,
                           const CopulaPathWork& work, int j);

struct PriceResult {
    double price = 0.0;
    double std_error = 0.0;
    long n_paths = 0;
    std::uint64_t seed = 0;
};

PriceResult price(const CorrelationModel& model, const MarginalSet& marginals,
                  const Payoff& payoff, long n_paths, std::uint64_t seed);
PriceResult price_serial(const CorrelationModel& model, const MarginalSet& marginals,
                         const Payoff& payoff, long n_paths, std::uint64_t seed);

struct CorrRiskResult {
    double price = 0.0;
    double price_se = 0.0;
    Matrix rho_bar;       // averaged over included paths
    long n_paths = 0;
    long n_excluded = 0;  // paths dropped from the sensitivity average (pdf underflow)
    std::uint64_t seed = 0;
};

// Price plus the full averaged correlation-risk matrix. Paths whose marginal
// pdf underflows are excluded from the sensitivity average (counted, warned)
// but still contribute to the price.
CorrRiskResult corr_risk(const CorrelationModel& model, const MarginalSet& marginals,
                         const Payoff& payoff, long n_paths, std::uint64_t seed);
CorrRiskResult corr_risk_serial(const CorrelationModel& model, const MarginalSet& marginals,
                                const Payoff& payoff, long n_paths, std::uint64_t seed);

}  // namespace adjg::copula
