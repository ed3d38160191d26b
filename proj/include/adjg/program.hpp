#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "adjg/tape.hpp"

namespace adjg::ad {

// A replayable straight-line program: the structure is fixed at generation
// time, so the same function can be re-taped at perturbed inputs (what a
// finite-difference oracle needs) or swept in either mode.
struct Instr {
    Op op = Op::add;
    int a = -1;  // operand as value index: 0..n_inputs-1 are inputs, then instruction results
    int b = -1;
    double c = 0.0;  // constant for the *_const operations
};

class Program {
public:
    int n_inputs = 0;
    std::vector<Instr> code;

    NodeId record(Tape& tape, std::span<const double> x) const;
    double eval(std::span<const double> x) const;
};

// Random smooth program over the elementary operation set. Arguments of log,
// sqrt, div and pow are guarded through x^2 + 1/2 composites and growth is
// damped with constant rescales, so values stay bounded and every generated
// function is smooth on all of R^n.
Program random_smooth_program(std::uint64_t seed, int n_inputs, int n_ops);

}  // namespace adjg::ad
