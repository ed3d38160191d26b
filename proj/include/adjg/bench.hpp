#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace adjg::bench {

struct BenchRow {
    std::string case_name;
    long n_inputs = 0;
    double primal_time = 0.0;    // seconds, median of repetitions
    double gradient_time = 0.0;  // seconds, median of repetitions
    double ratio = 0.0;          // gradient_time / primal_time
};

struct BenchReport {
    std::vector<BenchRow> rows;
    std::string timestamp;
    int repetitions = 0;

    std::string to_json() const;
    std::string to_csv() const;
};

// Median wall time of one call, at least `reps` timed repetitions after one
// discarded warmup; the callable is looped internally so each repetition is
// long enough to time.
double median_seconds(const std::function<void()>& fn, int reps = 5);

// Gradient-to-primal cost ratios on a family of dense smooth functions:
// stride-doubling mixing layers of products, sums and transcendentals, depth
// growing with the input count. Rows per size: "reverse-n<k>" (one backward
// sweep, tape build included) and "forward-n<k>" (n unit-seed forward
// sweeps), each against the plain double evaluation.
BenchReport bench_cheap_gradient(std::span<const int> sizes);

// Full correlation-risk matrix per path: one adjoint sweep (primal_time)
// versus the tangent loop over every strict-lower entry (gradient_time);
// ratio is the adjoint's speedup factor.
BenchReport bench_copula_speedup(std::span<const int> n_names);

// OpenMP path loop versus the serial reference on the two Monte Carlo
// engines; primal_time is the parallel run, gradient_time the serial one.
BenchReport bench_mc_threads(long n_paths, int n_steps);

// Cost asymmetry of the two parameter-sensitivity routes as the parameter
// count grows: one backward sweep (primal_time) versus the forward matrix
// recursion (gradient_time), per path. The tangent route's cost climbs a
// dimension faster, so the ratio grows with the parameter count.
BenchReport bench_sde_param_scaling(std::span<const int> n_params);

}  // namespace adjg::bench
