#pragma once

#include <vector>

#include "romfac/net.hpp"
#include "romfac/tensor.hpp"

namespace romfac::diffcore {

enum class LeafKind { none, parameter, input, constant };

struct ValueId {
    int index = -1;
    bool valid() const { return index >= 0; }
};

// Reverse-mode tape over a feedforward graph. Nodes are appended in
// evaluation order, so walking indices backward is a topological sweep
// and backward() touches each node exactly once. A tape is single-use:
// build the expression, call backward once, read gradients.
class GradientTape {
public:
    ValueId leaf(Tensor value, LeafKind kind);
    ValueId constant(Tensor value) { return leaf(std::move(value), LeafKind::constant); }

    // weights [out,in] * input [in] + bias [out]
    ValueId linear(ValueId weights, ValueId bias, ValueId input);
    ValueId relu(ValueId x);
    ValueId tanh(ValueId x);
    ValueId activation(ValueId x, Activation act);
    ValueId softmax(ValueId logits);
    ValueId cross_entropy(ValueId probs, int label);
    ValueId concat(const std::vector<ValueId>& parts);
    ValueId add(ValueId a, ValueId b);
    ValueId sub(ValueId a, ValueId b);
    ValueId square(ValueId x);
    ValueId scale(ValueId x, double factor);
    ValueId shift(ValueId x, double offset);
    ValueId sum(const std::vector<ValueId>& terms);

    // output must be a scalar node; call once per tape
    void backward(ValueId output);

    const Tensor& value(ValueId id) const { return nodes_[checked(id)].value; }
    // Zero tensor if the node did not influence the output.
    const Tensor& gradient(ValueId id) const;
    bool backward_done() const { return backward_done_; }
    int node_count() const { return static_cast<int>(nodes_.size()); }
    LeafKind leaf_kind(ValueId id) const { return nodes_[checked(id)].leaf; }

private:
    enum class Op {
        leaf, linear, relu, tanh_, softmax, cross_entropy,
        concat, add, sub, square, scale, shift, sum
    };

    struct Node {
        Tensor value;
        Op op = Op::leaf;
        LeafKind leaf = LeafKind::none;
        std::vector<int> parents;
        double aux = 0.0;  // scale factor / shift offset / label index
    };

    int checked(ValueId id) const;
    ValueId push(Node node);
    Tensor& grad_buffer(int index);
    void backprop_node(int index);

    std::vector<Node> nodes_;
    std::vector<Tensor> grads_;
    bool backward_done_ = false;
};

// Net parameters registered on a tape, in the same order as
// FeedforwardNet::for_each_param.
struct TapeNet {
    std::vector<ValueId> weights;
    std::vector<ValueId> biases;
    Activation hidden_activation = Activation::relu;
};

TapeNet put_on_tape(GradientTape& tape, const FeedforwardNet& net, LeafKind kind);
ValueId net_forward(GradientTape& tape, const TapeNet& net, ValueId input);

}  // namespace romfac::diffcore
