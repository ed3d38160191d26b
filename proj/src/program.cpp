#include "adjg/program.hpp"

#include <stdexcept>

#include "adjg/rng.hpp"

namespace adjg::ad {

NodeId Program::record(Tape& tape, std::span<const double> x) const {
    if (x.size() != static_cast<std::size_t>(n_inputs)) {
        throw std::invalid_argument("Program::record: input length mismatch");
    }
    if (code.empty()) throw std::invalid_argument("Program::record: empty program");
    std::vector<NodeId> slot(n_inputs + code.size());
    tape.reserve(tape.size() + n_inputs + code.size());
    for (int i = 0; i < n_inputs; ++i) slot[i] = tape.add_input(x[i]);
    for (std::size_t i = 0; i < code.size(); ++i) {
        const Instr& ins = code[i];
        NodeId id;
        switch (ins.op) {
            case Op::add_const:
            case Op::mul_const:
            case Op::pow_const:
                id = tape.apply_const(ins.op, slot[ins.a], ins.c);
                break;
            case Op::add:
            case Op::sub:
            case Op::mul:
            case Op::div:
                id = tape.apply(ins.op, slot[ins.a], slot[ins.b]);
                break;
            default:
                id = tape.apply(ins.op, slot[ins.a]);
                break;
        }
        slot[n_inputs + i] = id;
    }
    return slot.back();
}

double Program::eval(std::span<const double> x) const {
    Tape tape;
    return tape.value(record(tape, x));
}

Program random_smooth_program(std::uint64_t seed, int n_inputs, int n_ops) {
    if (n_inputs < 1 || n_ops < 1) {
        throw std::invalid_argument("random_smooth_program: need at least one input and one op");
    }
    CounterRng rng(seed);
    Program prog;
    prog.n_inputs = n_inputs;

    int n_values = n_inputs;
    auto pick = [&]() { return static_cast<int>(rng.next_uniform() * n_values); };
    auto emit = [&](Instr ins) {
        prog.code.push_back(ins);
        return n_values++;
    };
    // x^2 + 1/2: strictly positive, bounded away from zero.
    auto guarded_square = [&](int a) {
        const int sq = emit({Op::mul, a, a});
        return emit({Op::add_const, sq, -1, 0.5});
    };

    while (static_cast<int>(prog.code.size()) < n_ops) {
        const double r = rng.next_uniform();
        const int a = pick();
        if (r < 0.12) {
            const int s = emit({Op::add, a, pick()});
            emit({Op::mul_const, s, -1, 0.5});
        } else if (r < 0.22) {
            const int s = emit({Op::sub, a, pick()});
            emit({Op::mul_const, s, -1, 0.5});
        } else if (r < 0.36) {
            const int s = emit({Op::mul, a, pick()});
            emit({Op::mul_const, s, -1, 0.15});
        } else if (r < 0.44) {
            const int denom = guarded_square(pick());
            const int s = emit({Op::div, a, denom});
            emit({Op::mul_const, s, -1, 0.5});
        } else if (r < 0.56) {
            emit({Op::sin_op, a});
        } else if (r < 0.66) {
            emit({Op::cos_op, a});
        } else if (r < 0.73) {
            const int s = emit({Op::sin_op, a});
            emit({Op::exp_op, s});
        } else if (r < 0.80) {
            emit({Op::log_op, guarded_square(a)});
        } else if (r < 0.86) {
            emit({Op::sqrt_op, guarded_square(a)});
        } else if (r < 0.90) {
            const double exponents[3] = {0.5, -0.5, -1.0};
            const double e = exponents[static_cast<int>(rng.next_uniform() * 3.0)];
            emit({Op::pow_const, guarded_square(a), -1, e});
        } else if (r < 0.95) {
            emit({Op::mul_const, a, -1, 2.0 * rng.next_uniform() - 1.0});
        } else if (r < 0.98) {
            emit({Op::add_const, a, -1, 2.0 * rng.next_uniform() - 1.0});
        } else {
            emit({Op::neg, a});
        }
    }
    return prog;
}

}  // namespace adjg::ad
