#pragma once

#include <array>
#include <complex>
#include <vector>

#include "adjg/tape.hpp"

namespace adjg {

// The worked three-input composite used by the `simple-example` scenario and
// the verification battery: a chain of transcendental statements squashed to
// a squared distance from w0. Generic over the scalar so the same formula
// runs on plain doubles, complex step, or the tape.
template <typename S>
S simple_example(const S& a, const S& b, const S& c, double w0) {
    using std::cos;
    using std::exp;
    using std::log;
    using std::sin;
    const S u = sin(a * b) + c * (b * b) + (a * a * a) * (c * c);
    const S v = exp(u * u - 1.0) + a * a;
    const S w = log(v * v + 1.0) + cos(c * c - 1.0);
    const S d = w - w0;
    return d * d;
}

inline double simple_example_value(double a, double b, double c, double w0) {
    return simple_example<double>(a, b, c, w0);
}

// Records the function on a fresh tape; returns the output node.
inline ad::NodeId simple_example_record(ad::Tape& tape, double a, double b, double c, double w0) {
    const ad::Var va = ad::make_input(tape, a);
    const ad::Var vb = ad::make_input(tape, b);
    const ad::Var vc = ad::make_input(tape, c);
    return simple_example<ad::Var>(va, vb, vc, w0).id();
}

// Gradient by one backward pass.
inline std::vector<double> simple_example_grad_reverse(double a, double b, double c, double w0) {
    ad::Tape tape;
    const ad::NodeId out = simple_example_record(tape, a, b, c, w0);
    return ad::reverse_sweep(tape, out);
}

// Gradient by three unit-seed forward passes.
inline std::vector<double> simple_example_grad_forward(double a, double b, double c, double w0) {
    ad::Tape tape;
    const ad::NodeId out = simple_example_record(tape, a, b, c, w0);
    std::vector<double> grad(3);
    for (int i = 0; i < 3; ++i) {
        std::array<double, 3> seed{};
        seed[i] = 1.0;
        grad[i] = ad::forward_sweep(tape, out, seed);
    }
    return grad;
}

}  // namespace adjg
