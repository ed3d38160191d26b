#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>

#include "adjg/linalg.hpp"
#include "adjg/normal.hpp"
#include "adjg/rng.hpp"
#include "adjg/simple_example.hpp"
#include "adjg/verify.hpp"

using namespace adjg;

TEST_CASE("fd gradient on quadratics and linear functions") {
    verify::RealFn square = [](std::span<const double> x) { return x[0] * x[0]; };
    const std::vector<double> x{3.0};
    const std::vector<double> g = verify::fd_gradient(square, x, 1e-6);
    CHECK(g[0] == doctest::Approx(6.0).epsilon(1e-9));

    verify::RealFn sum = [](std::span<const double> x) { return x[0] + x[1]; };
    const std::vector<double> x2{0.3, -0.4};
    const std::vector<double> g2 = verify::fd_gradient(sum, x2, 1e-6);
    CHECK(std::abs(g2[0] - 1.0) < 1e-10);
    CHECK(std::abs(g2[1] - 1.0) < 1e-10);

    CHECK_THROWS_AS(verify::fd_gradient(square, x, 0.0), std::invalid_argument);
}

TEST_CASE("fd error shrinks like h^2 on smooth functions") {
    verify::RealFn f = [](std::span<const double> x) { return std::exp(x[0]); };
    const std::vector<double> x{0.7};
    const double exact = std::exp(0.7);
    double prev_err = 0.0;
    const double hs[3] = {1e-2, 5e-3, 2.5e-3};
    for (int i = 0; i < 3; ++i) {
        const double err = std::abs(verify::fd_gradient(f, x, hs[i])[0] - exact);
        if (i > 0) {
            const double ratio = prev_err / err;
            CHECK(ratio > 3.0);
            CHECK(ratio < 5.0);
        }
        prev_err = err;
    }
}

TEST_CASE("complex step reaches machine precision") {
    verify::ComplexFn expf = [](std::span<const std::complex<double>> x) { return std::exp(x[0]); };
    const std::vector<double> x0{0.0};
    CHECK(verify::complex_step_gradient(expf, x0)[0] == doctest::Approx(1.0).epsilon(1e-15));

    verify::ComplexFn cube = [](std::span<const std::complex<double>> x) {
        return x[0] * x[0] * x[0];
    };
    const std::vector<double> x1{2.0};
    CHECK(verify::complex_step_gradient(cube, x1)[0] == doctest::Approx(12.0).epsilon(1e-14));
}

TEST_CASE("complex step is insensitive to the step size") {
    verify::ComplexFn f = [](std::span<const std::complex<double>> x) {
        return std::sin(x[0]) * std::exp(x[1]) + x[0] / (x[1] + 2.0);
    };
    const std::vector<double> x{0.8, -0.3};
    const std::vector<double> g10 = verify::complex_step_gradient(f, x, 1e-10);
    const std::vector<double> g20 = verify::complex_step_gradient(f, x, 1e-20);
    for (int i = 0; i < 2; ++i) {
        CHECK(std::abs(g10[i] - g20[i]) / std::abs(g20[i]) < 1e-13);
    }
}

TEST_CASE("complex step agrees with reverse sweep on the worked composite") {
    const double a = 1.1, b = 0.7, c = 0.9, w0 = 1.0;
    const std::vector<double> rev = simple_example_grad_reverse(a, b, c, w0);
    const std::vector<double> x{a, b, c};
    const std::vector<double> cs = verify::complex_step_gradient(
        [w0](std::span<const std::complex<double>> p) {
            return simple_example<std::complex<double>>(p[0], p[1], p[2], w0);
        },
        x);
    const verify::GradCheckReport report = verify::compare_gradients(rev, cs, 1e-12);
    CHECK(report.pass);
}

TEST_CASE("dot product check on explicit operators") {
    verify::ApplyFn identity = [](std::span<const double> q) {
        return std::vector<double>(q.begin(), q.end());
    };
    const std::vector<double> q{1.0, 2.0};
    CHECK(verify::dot_product_check(identity, identity, q) == 0.0);

    Matrix a(2, 2);
    a(0, 0) = 1.0;
    a(0, 1) = 2.0;
    a(1, 0) = 3.0;
    a(1, 1) = 4.0;
    verify::ApplyFn apply = [&](std::span<const double> v) { return matvec(a, v); };
    verify::ApplyFn apply_t = [&](std::span<const double> v) { return matvec_transposed(a, v); };
    CHECK(verify::dot_product_check(apply, apply_t, q) < 1e-15);
    CHECK(verify::dot_product_check(apply, apply_t, 2, 99) < 1e-15);
}

TEST_CASE("compare_gradients reports the worst component") {
    const std::vector<double> g1{1.0, 2.0, 3.0};
    CHECK(verify::compare_gradients(g1, g1, 1e-12).pass);

    const std::vector<double> g2{1.0, 2.0, 3.0 + 1e-6};
    const verify::GradCheckReport r = verify::compare_gradients(g1, g2, 1e-12);
    CHECK_FALSE(r.pass);
    CHECK(r.worst_index == 2);
    CHECK(r.max_abs_diff == doctest::Approx(1e-6));

    CHECK_THROWS_AS(verify::compare_gradients(g1, std::vector<double>{1.0}, 1e-12),
                    std::invalid_argument);

    const std::string json = r.to_json();
    CHECK(json.find("\"pass\":false") != std::string::npos);
    CHECK(json.find("\"worst_index\":2") != std::string::npos);
}

TEST_CASE("standard normal cdf matches reference values") {
    CHECK(norm_cdf(0.0) == 0.5);
    CHECK(std::abs(norm_cdf(1.0) - 0.8413447460685429486) < 1e-16);
    CHECK(std::abs(norm_cdf(2.0) - 0.9772498680518207928) < 1e-16);
    CHECK(std::abs(norm_cdf(-1.0) - 0.1586552539314570514) < 1e-16);
}

TEST_CASE("inverse normal cdf round trips through the cdf") {
    for (double u : {1e-12, 1e-8, 1e-4, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0 - 1e-4, 1.0 - 1e-8}) {
        const double x = norm_inv_cdf(u);
        CHECK(std::abs(norm_cdf(x) - u) <= 1e-15);
    }
    CHECK(norm_inv_cdf(0.5) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK_THROWS_AS(norm_inv_cdf(0.0), std::domain_error);
    CHECK_THROWS_AS(norm_inv_cdf(1.0), std::domain_error);
}

TEST_CASE("counter rng is a pure function of seed, stream, counter") {
    CounterRng a(42, 7);
    CounterRng b(42, 7);
    for (int i = 0; i < 100; ++i) {
        const double u = a.next_uniform();
        CHECK(u == b.next_uniform());
        CHECK(u > 0.0);
        CHECK(u < 1.0);
    }
    CHECK(CounterRng::uniform_at(42, 7, 3) == [] {
        CounterRng c(42, 7);
        c.next_uniform();
        c.next_uniform();
        c.next_uniform();
        return c.next_uniform();
    }());
    // different streams decorrelate
    CounterRng c(42, 8);
    CHECK(c.next_uniform() != CounterRng(42, 7).next_uniform());
}

TEST_CASE("counter rng normals have sane first moments") {
    CounterRng rng(2024);
    const int n = 200000;
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = rng.next_normal();
        sum += z;
        sum_sq += z * z;
    }
    const double mean = sum / n;
    const double var = sum_sq / n - mean * mean;
    CHECK(std::abs(mean) < 4.0 / std::sqrt(static_cast<double>(n)));
    CHECK(std::abs(var - 1.0) < 0.02);
}
