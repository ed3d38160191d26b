#include "adjg/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "adjg/linalg.hpp"
#include "adjg/rng.hpp"

namespace adjg::verify {

std::string GradCheckReport::to_json() const {
    std::ostringstream os;
    os.precision(17);
    os << "{\"max_abs_diff\":" << max_abs_diff << ",\"max_rel_diff\":" << max_rel_diff
       << ",\"worst_index\":" << worst_index << ",\"pass\":" << (pass ? "true" : "false")
       << ",\"tolerance\":" << tolerance << "}";
    return os.str();
}

std::vector<double> fd_gradient(const RealFn& f, std::span<const double> x, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("fd_gradient: step must be positive");
    std::vector<double> xp(x.begin(), x.end());
    std::vector<double> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        xp[i] = x[i] + h;
        const double fp = f(xp);
        xp[i] = x[i] - h;
        const double fm = f(xp);
        xp[i] = x[i];
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

std::vector<double> complex_step_gradient(const ComplexFn& f, std::span<const double> x, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("complex_step_gradient: step must be positive");
    std::vector<std::complex<double>> xc(x.begin(), x.end());
    std::vector<double> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        xc[i] = {x[i], h};
        g[i] = f(xc).imag() / h;
        xc[i] = x[i];
    }
    return g;
}

double dot_product_check(const ApplyFn& tangent_apply, const ApplyFn& adjoint_apply,
                         std::span<const double> q) {
    const std::vector<double> aq = tangent_apply(q);
    const std::vector<double> ataq = adjoint_apply(aq);
    if (ataq.size() != q.size()) {
        throw std::invalid_argument("dot_product_check: adjoint result dimension mismatch");
    }
    const double lhs = dot(aq, aq);
    const double rhs = dot(q, ataq);
    return std::abs(lhs - rhs) / std::max(lhs, 1e-300);
}

double dot_product_check(const ApplyFn& tangent_apply, const ApplyFn& adjoint_apply, int dim,
                         std::uint64_t rng_seed) {
    CounterRng rng(rng_seed);
    std::vector<double> q(dim);
    rng.fill_normal(q);
    return dot_product_check(tangent_apply, adjoint_apply, q);
}

GradCheckReport compare_gradients(std::span<const double> g1, std::span<const double> g2,
                                  double tol) {
    if (g1.size() != g2.size()) throw std::invalid_argument("compare_gradients: length mismatch");
    GradCheckReport r;
    r.tolerance = tol;
    for (std::size_t i = 0; i < g1.size(); ++i) {
        const double ad = std::abs(g1[i] - g2[i]);
        const double denom = std::max({std::abs(g1[i]), std::abs(g2[i]), 1e-10});
        const double rd = ad / denom;
        r.max_abs_diff = std::max(r.max_abs_diff, ad);
        if (rd >= r.max_rel_diff) {
            r.max_rel_diff = rd;
            r.worst_index = static_cast<int>(i);
        }
    }
    r.pass = r.max_rel_diff <= tol;
    return r;
}

}  // namespace adjg::verify
