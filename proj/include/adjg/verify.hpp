#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace adjg::verify {

struct GradCheckReport {
    double max_abs_diff = 0.0;
    double max_rel_diff = 0.0;
    int worst_index = -1;
    bool pass = true;
    double tolerance = 0.0;

    std::string to_json() const;
};

using RealFn = std::function<double(std::span<const double>)>;
using ComplexFn = std::function<std::complex<double>(std::span<const std::complex<double>>)>;
using ApplyFn = std::function<std::vector<double>(std::span<const double>)>;

// Central finite differences, (f(x+h e_i) - f(x-h e_i)) / 2h per component.
std::vector<double> fd_gradient(const RealFn& f, std::span<const double> x, double h = 1e-6);

// Complex-step derivatives, Im(f(x + i h e_i)) / h; no subtractive cancellation.
std::vector<double> complex_step_gradient(const ComplexFn& f, std::span<const double> x,
                                          double h = 1e-20);

// Residual of the transpose identity <Aq, Aq> = <q, A^T(Aq)> for a
// tangent/adjoint operator pair, relative to <Aq, Aq>.
double dot_product_check(const ApplyFn& tangent_apply, const ApplyFn& adjoint_apply,
                         std::span<const double> q);

// Same check with q drawn from the seeded counter stream.
double dot_product_check(const ApplyFn& tangent_apply, const ApplyFn& adjoint_apply, int dim,
                         std::uint64_t rng_seed);

// Componentwise comparison with relative error floored at 1e-10 magnitude.
GradCheckReport compare_gradients(std::span<const double> g1, std::span<const double> g2,
                                  double tol);

}  // namespace adjg::verify
