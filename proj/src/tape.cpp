#include "adjg/tape.hpp"

#include <ostream>

namespace adjg::ad {

const char* op_name(Op op) {
    switch (op) {
        case Op::input: return "input";
        case Op::add: return "add";
        case Op::sub: return "sub";
        case Op::mul: return "mul";
        case Op::div: return "div";
        case Op::neg: return "neg";
        case Op::sin_op: return "sin";
        case Op::cos_op: return "cos";
        case Op::exp_op: return "exp";
        case Op::log_op: return "log";
        case Op::sqrt_op: return "sqrt";
        case Op::pow_const: return "pow-const";
        case Op::add_const: return "add-const";
        case Op::mul_const: return "mul-const";
        case Op::custom: return "custom";
    }
    return "?";
}

void Tape::throw_domain(Op op, const char* what, double arg) const {
    const NodeId here = static_cast<NodeId>(nodes_.size());
    throw TapeError(here, std::string(op_name(op)) + " at node " + std::to_string(here) + ": " +
                              what + " (" + std::to_string(arg) + ")");
}

NodeId Tape::push(Node n, double value) {
    const NodeId id = static_cast<NodeId>(nodes_.size());
    const bool finite = std::isfinite(value) && (n.n_parents < 1 || std::isfinite(n.da)) &&
                        (n.n_parents < 2 || std::isfinite(n.db));
    if (!finite) {
        throw TapeError(id, std::string(op_name(n.op)) + " at node " + std::to_string(id) +
                                ": non-finite value or partial");
    }
    nodes_.push_back(n);
    values_.push_back(value);
    return id;
}

void Tape::check_id(NodeId id) const {
    if (id >= nodes_.size()) {
        throw TapeError(static_cast<NodeId>(nodes_.size()),
                        "argument node " + std::to_string(id) + " does not exist");
    }
}

NodeId Tape::add_input(double value) {
    Node n;
    n.op = Op::input;
    const NodeId id = push(n, value);
    inputs_.push_back(id);
    return id;
}

NodeId Tape::apply(Op op, NodeId x) {
    check_id(x);
    const double xv = values_[x];
    Node n;
    n.n_parents = 1;
    n.a = x;
    n.op = op;
    double value;
    switch (op) {
        case Op::neg:
            value = -xv;
            n.da = -1.0;
            break;
        case Op::sin_op:
            value = std::sin(xv);
            n.da = std::cos(xv);
            break;
        case Op::cos_op:
            value = std::cos(xv);
            n.da = -std::sin(xv);
            break;
        case Op::exp_op:
            value = std::exp(xv);
            n.da = value;
            break;
        case Op::log_op:
            if (xv <= 0.0) throw_domain(op, "non-positive argument", xv);
            value = std::log(xv);
            n.da = 1.0 / xv;
            break;
        case Op::sqrt_op:
            if (xv < 0.0) throw_domain(op, "negative argument", xv);
            value = std::sqrt(xv);
            n.da = 0.5 / value;  // xv == 0 yields inf, rejected by the finite check
            break;
        default:
            throw_domain(op, "not a unary operation", xv);
    }
    return push(n, value);
}

NodeId Tape::apply(Op op, NodeId x, NodeId y) {
    check_id(x);
    check_id(y);
    const double xv = values_[x];
    const double yv = values_[y];
    Node n;
    n.n_parents = 2;
    n.a = x;
    n.b = y;
    n.op = op;
    double value;
    switch (op) {
        case Op::add:
            value = xv + yv;
            n.da = 1.0;
            n.db = 1.0;
            break;
        case Op::sub:
            value = xv - yv;
            n.da = 1.0;
            n.db = -1.0;
            break;
        case Op::mul:
            value = xv * yv;
            n.da = yv;
            n.db = xv;
            break;
        case Op::div:
            if (yv == 0.0) throw_domain(op, "division by zero", yv);
            value = xv / yv;
            n.da = 1.0 / yv;
            n.db = -value / yv;
            break;
        default:
            throw_domain(op, "not a binary operation", xv);
    }
    return push(n, value);
}

NodeId Tape::apply_const(Op op, NodeId x, double c) {
    check_id(x);
    const double xv = values_[x];
    Node n;
    n.n_parents = 1;
    n.a = x;
    n.op = op;
    double value;
    switch (op) {
        case Op::add_const:
            value = xv + c;
            n.da = 1.0;
            break;
        case Op::mul_const:
            value = c * xv;
            n.da = c;
            break;
        case Op::pow_const:
            value = std::pow(xv, c);
            n.da = c * std::pow(xv, c - 1.0);
            break;
        default:
            throw_domain(op, "takes no constant", c);
    }
    return push(n, value);
}

std::uint16_t Tape::register_op(std::string name, int arity,
                                std::function<CustomOpEval(double, double)> eval) {
    if (arity < 1 || arity > 2) throw std::invalid_argument("register_op: arity must be 1 or 2");
    custom_.push_back({std::move(name), arity, std::move(eval)});
    return static_cast<std::uint16_t>(custom_.size() - 1);
}

NodeId Tape::apply_custom(std::uint16_t id, NodeId x) {
    check_id(x);
    const CustomOp& c = custom_.at(id);
    if (c.arity != 1) throw std::invalid_argument("apply_custom: " + c.name + " is binary");
    const CustomOpEval e = c.eval(values_[x], 0.0);
    Node n;
    n.op = Op::custom;
    n.custom_id = id;
    n.n_parents = 1;
    n.a = x;
    n.da = e.da;
    return push(n, e.value);
}

NodeId Tape::apply_custom(std::uint16_t id, NodeId x, NodeId y) {
    check_id(x);
    check_id(y);
    const CustomOp& c = custom_.at(id);
    if (c.arity != 2) throw std::invalid_argument("apply_custom: " + c.name + " is unary");
    const CustomOpEval e = c.eval(values_[x], values_[y]);
    Node n;
    n.op = Op::custom;
    n.custom_id = id;
    n.n_parents = 2;
    n.a = x;
    n.b = y;
    n.da = e.da;
    n.db = e.db;
    return push(n, e.value);
}

const std::string& Tape::custom_name(std::uint16_t id) const { return custom_.at(id).name; }

void Tape::dump(std::ostream& os) const {
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const Node& n = nodes_[i];
        os << i << ' ' << (n.op == Op::custom ? custom_.at(n.custom_id).name : op_name(n.op));
        for (int p = 0; p < n.n_parents; ++p) os << ' ' << (p == 0 ? n.a : n.b);
        if (n.n_parents >= 1) os << ' ' << n.da;
        if (n.n_parents >= 2) os << ' ' << n.db;
        os << ' ' << values_[i] << '\n';
    }
}

namespace {

// Sweep workspaces are reused per thread; completed tapes are read-only, so
// concurrent sweeps over shared tapes stay independent.
thread_local std::vector<double> t_dot;
thread_local std::vector<double> t_adj;

}  // namespace

double forward_sweep(const Tape& tape, NodeId output, std::span<const double> seed) {
    if (output >= tape.size()) throw std::invalid_argument("forward_sweep: output node does not exist");
    const NodeId outs[1] = {output};
    return forward_sweep_many(tape, outs, seed)[0];
}

std::vector<double> forward_sweep_many(const Tape& tape, std::span<const NodeId> outputs,
                                       std::span<const double> seed) {
    if (seed.size() != tape.n_inputs()) {
        throw std::invalid_argument("forward_sweep: seed length " + std::to_string(seed.size()) +
                                    " does not match input count " + std::to_string(tape.n_inputs()));
    }
    std::vector<double>& dot = t_dot;
    dot.assign(tape.size(), 0.0);
    const auto& inputs = tape.input_ids();
    for (std::size_t i = 0; i < inputs.size(); ++i) dot[inputs[i]] = seed[i];
    for (NodeId id = 0; id < tape.size(); ++id) {
        const Node& n = tape.node(id);
        if (n.n_parents == 0) continue;
        double d = n.da * dot[n.a];
        if (n.n_parents == 2) d += n.db * dot[n.b];
        dot[id] = d;
    }
    std::vector<double> out;
    out.reserve(outputs.size());
    for (NodeId o : outputs) {
        if (o >= tape.size()) throw std::invalid_argument("forward_sweep: output node does not exist");
        out.push_back(dot[o]);
    }
    return out;
}

std::vector<double> reverse_sweep(const Tape& tape, NodeId output) {
    if (output >= tape.size()) throw std::invalid_argument("reverse_sweep: output node does not exist");
    const NodeId outs[1] = {output};
    const double seed[1] = {1.0};
    return vjp(tape, outs, seed);
}

std::vector<double> vjp(const Tape& tape, std::span<const NodeId> outputs,
                        std::span<const double> output_adjoints) {
    if (outputs.size() != output_adjoints.size()) {
        throw std::invalid_argument("vjp: outputs and adjoint seeds differ in length");
    }
    std::vector<double>& adj = t_adj;
    adj.assign(tape.size(), 0.0);
    for (std::size_t i = 0; i < outputs.size(); ++i) {
        if (outputs[i] >= tape.size()) throw std::invalid_argument("vjp: output node does not exist");
        adj[outputs[i]] += output_adjoints[i];
    }
    for (NodeId id = static_cast<NodeId>(tape.size()); id-- > 0;) {
        const double bar = adj[id];
        if (bar == 0.0) continue;
        const Node& n = tape.node(id);
        if (n.n_parents == 0) continue;
        adj[n.a] += n.da * bar;
        if (n.n_parents == 2) adj[n.b] += n.db * bar;
    }
    const auto& inputs = tape.input_ids();
    std::vector<double> grad(inputs.size());
    for (std::size_t i = 0; i < inputs.size(); ++i) grad[i] = adj[inputs[i]];
    return grad;
}

}  // namespace adjg::ad
