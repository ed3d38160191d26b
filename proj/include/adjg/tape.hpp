#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace adjg::ad {

using NodeId = std::uint32_t;

// Elementary operations. Constants are folded into the *_const variants so a
// tape never carries constant nodes; only inputs have zero parents.
enum class Op : std::uint8_t {
    input,
    add,
    sub,
    mul,
    div,
    neg,
    sin_op,
    cos_op,
    exp_op,
    log_op,
    sqrt_op,
    pow_const,
    add_const,
    mul_const,
    custom,
};

const char* op_name(Op op);

// Values live in a separate array so the sweep passes stream only what they
// read: parents and partials.
struct Node {
    Op op = Op::input;
    std::uint8_t n_parents = 0;
    std::uint16_t custom_id = 0;
    NodeId a = 0;
    NodeId b = 0;
    double da = 0.0;  // d(value)/d(node a), fixed at record time
    double db = 0.0;  // d(value)/d(node b)
};

// Raised when recording would produce a non-finite value or partial (domain
// violations: log of a non-positive, division by zero, sqrt of a negative).
class TapeError : public std::runtime_error {
public:
    TapeError(NodeId node, const std::string& what) : std::runtime_error(what), node_(node) {}
    NodeId node() const { return node_; }

private:
    NodeId node_;
};

struct CustomOpEval {
    double value = 0.0;
    double da = 0.0;
    double db = 0.0;
};

// Record of a computation as a topologically ordered list of elementary
// operations with values and local partials stored at record time, so both
// sweep directions are pure linear passes over the node list. Single-writer
// while recording; immutable and safe to share across threads once built.
class Tape {
public:
    // Recording is on the hot path of every taped evaluation; the bodies are
    // inline below so call sites with a fixed op compile to straight-line code.
    NodeId add_input(double value);

    NodeId apply(Op op, NodeId x);
    NodeId apply(Op op, NodeId x, NodeId y);
    NodeId apply_const(Op op, NodeId x, double c);

    // Extends the operation set with a user-supplied value+partials rule.
    std::uint16_t register_op(std::string name, int arity,
                              std::function<CustomOpEval(double, double)> eval);
    NodeId apply_custom(std::uint16_t id, NodeId x);
    NodeId apply_custom(std::uint16_t id, NodeId x, NodeId y);

    std::size_t size() const { return nodes_.size(); }
    std::size_t n_inputs() const { return inputs_.size(); }
    const std::vector<NodeId>& input_ids() const { return inputs_; }
    const Node& node(NodeId id) const { return nodes_[id]; }
    double value(NodeId id) const { return values_[id]; }
    void reserve(std::size_t n) {
        nodes_.reserve(n);
        values_.reserve(n);
    }

    // Drops all nodes and inputs but keeps the allocations and the custom-op
    // registry, so a tape can be re-recorded without heap churn.
    void clear() {
        nodes_.clear();
        values_.clear();
        inputs_.clear();
    }

    // Line-oriented debug dump: "id op parent-ids partials value".
    void dump(std::ostream& os) const;

    const std::string& custom_name(std::uint16_t id) const;

private:
    struct CustomOp {
        std::string name;
        int arity;
        std::function<CustomOpEval(double, double)> eval;
    };

    NodeId push(Node n, double value);
    void check_id(NodeId id) const;
    [[noreturn]] void throw_domain(Op op, const char* what, double arg) const;

    std::vector<Node> nodes_;
    std::vector<double> values_;
    std::vector<NodeId> inputs_;
    std::vector<CustomOp> custom_;
};

// Directional derivative of `output` along `seed` (one entry per tape input),
// propagated in tape order. One call per direction.
double forward_sweep(const Tape& tape, NodeId output, std::span<const double> seed);

// Tangents of several outputs from a single forward pass with one seed.
std::vector<double> forward_sweep_many(const Tape& tape, std::span<const NodeId> outputs,
                                       std::span<const double> seed);

// Gradient of a scalar output with respect to every input in one backward
// pass: seeds the output adjoint with 1 and accumulates parent adjoints.
std::vector<double> reverse_sweep(const Tape& tape, NodeId output);

// Vector-Jacobian product: backward pass seeded with one adjoint per
// designated output. reverse_sweep is the single-output case seeded with 1.
std::vector<double> vjp(const Tape& tape, std::span<const NodeId> outputs,
                        std::span<const double> output_adjoints);

// -----------------------------------------------------------------------------
// Expression-building handle so model code can write formulas naturally.
// -----------------------------------------------------------------------------

class Var {
public:
    Var() = default;
    Var(Tape* tape, NodeId id) : tape_(tape), id_(id) {}

    Tape* tape() const { return tape_; }
    NodeId id() const { return id_; }
    double value() const { return tape_->value(id_); }

private:
    Tape* tape_ = nullptr;
    NodeId id_ = 0;
};

inline Var make_input(Tape& tape, double value) { return {&tape, tape.add_input(value)}; }

inline Var operator+(Var x, Var y) { return {x.tape(), x.tape()->apply(Op::add, x.id(), y.id())}; }
inline Var operator-(Var x, Var y) { return {x.tape(), x.tape()->apply(Op::sub, x.id(), y.id())}; }
inline Var operator*(Var x, Var y) { return {x.tape(), x.tape()->apply(Op::mul, x.id(), y.id())}; }
inline Var operator/(Var x, Var y) { return {x.tape(), x.tape()->apply(Op::div, x.id(), y.id())}; }
inline Var operator-(Var x) { return {x.tape(), x.tape()->apply(Op::neg, x.id())}; }

inline Var operator+(Var x, double c) { return {x.tape(), x.tape()->apply_const(Op::add_const, x.id(), c)}; }
inline Var operator+(double c, Var x) { return x + c; }
inline Var operator-(Var x, double c) { return x + (-c); }
inline Var operator-(double c, Var x) { return (-x) + c; }
inline Var operator*(Var x, double c) { return {x.tape(), x.tape()->apply_const(Op::mul_const, x.id(), c)}; }
inline Var operator*(double c, Var x) { return x * c; }
inline Var operator/(Var x, double c) { return x * (1.0 / c); }

inline Var sin(Var x) { return {x.tape(), x.tape()->apply(Op::sin_op, x.id())}; }
inline Var cos(Var x) { return {x.tape(), x.tape()->apply(Op::cos_op, x.id())}; }
inline Var exp(Var x) { return {x.tape(), x.tape()->apply(Op::exp_op, x.id())}; }
inline Var log(Var x) { return {x.tape(), x.tape()->apply(Op::log_op, x.id())}; }
inline Var sqrt(Var x) { return {x.tape(), x.tape()->apply(Op::sqrt_op, x.id())}; }
inline Var pow(Var x, double c) { return {x.tape(), x.tape()->apply_const(Op::pow_const, x.id(), c)}; }
inline Var operator/(double c, Var x) { return pow(x, -1.0) * c; }

}  // namespace adjg::ad
