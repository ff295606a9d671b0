#include "romfac/tape.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace romfac::diffcore {

int GradientTape::checked(ValueId id) const {
    if (id.index < 0 || id.index >= static_cast<int>(nodes_.size()))
        throw std::logic_error("tape: invalid node id");
    return id.index;
}

ValueId GradientTape::push(Node node) {
    nodes_.push_back(std::move(node));
    return ValueId{static_cast<int>(nodes_.size()) - 1};
}

ValueId GradientTape::leaf(Tensor value, LeafKind kind) {
    Node n;
    n.value = std::move(value);
    n.op = Op::leaf;
    n.leaf = kind;
    return push(std::move(n));
}

ValueId GradientTape::linear(ValueId weights, ValueId bias, ValueId input) {
    const Tensor& w = value(weights);
    const Tensor& b = value(bias);
    const Tensor& x = value(input);
    if (w.shape.size() != 2) throw std::invalid_argument("linear: weights must be 2-D");
    const int out = w.shape[0];
    const int in = w.shape[1];
    if (x.size() != in || b.size() != out)
        throw std::invalid_argument("linear: shape mismatch " + shape_string(w.shape) + " * " +
                                    shape_string(x.shape) + " + " + shape_string(b.shape));
    Tensor y = Tensor::zeros({out});
    for (int r = 0; r < out; ++r) {
        double acc = b[r];
        const double* row = w.data.data() + static_cast<std::size_t>(r) * in;
        for (int c = 0; c < in; ++c) acc += row[c] * x[c];
        y[r] = acc;
    }
    Node n;
    n.value = std::move(y);
    n.op = Op::linear;
    n.parents = {weights.index, bias.index, input.index};
    return push(std::move(n));
}

ValueId GradientTape::relu(ValueId x) {
    Tensor y = value(x);
    for (double& v : y.data) v = v > 0.0 ? v : 0.0;
    Node n;
    n.value = std::move(y);
    n.op = Op::relu;
    n.parents = {x.index};
    return push(std::move(n));
}

ValueId GradientTape::tanh(ValueId x) {
    Tensor y = value(x);
    for (double& v : y.data) v = std::tanh(v);
    Node n;
    n.value = std::move(y);
    n.op = Op::tanh_;
    n.parents = {x.index};
    return push(std::move(n));
}

ValueId GradientTape::activation(ValueId x, Activation act) {
    return act == Activation::relu ? relu(x) : tanh(x);
}

ValueId GradientTape::softmax(ValueId logits) {
    Node n;
    n.value = diffcore::softmax(value(logits));
    n.op = Op::softmax;
    n.parents = {logits.index};
    return push(std::move(n));
}

ValueId GradientTape::cross_entropy(ValueId probs, int label) {
    const Tensor& p = value(probs);
    Node n;
    n.value = Tensor::scalar(diffcore::cross_entropy(p, label));
    n.op = Op::cross_entropy;
    n.parents = {probs.index};
    n.aux = static_cast<double>(label);
    return push(std::move(n));
}

ValueId GradientTape::concat(const std::vector<ValueId>& parts) {
    if (parts.empty()) throw std::invalid_argument("concat: no parts");
    std::vector<double> data;
    Node n;
    for (ValueId part : parts) {
        const Tensor& t = value(part);
        data.insert(data.end(), t.data.begin(), t.data.end());
        n.parents.push_back(part.index);
    }
    n.value = Tensor::vector(std::move(data));
    n.op = Op::concat;
    return push(std::move(n));
}

static void check_same_shape(const Tensor& a, const Tensor& b, const char* op) {
    if (!same_shape(a, b))
        throw std::invalid_argument(std::string(op) + ": shape mismatch " + shape_string(a.shape) +
                                    " vs " + shape_string(b.shape));
}

ValueId GradientTape::add(ValueId a, ValueId b) {
    const Tensor& ta = value(a);
    const Tensor& tb = value(b);
    check_same_shape(ta, tb, "add");
    Tensor y = ta;
    for (int i = 0; i < y.size(); ++i) y[i] += tb[i];
    Node n;
    n.value = std::move(y);
    n.op = Op::add;
    n.parents = {a.index, b.index};
    return push(std::move(n));
}

ValueId GradientTape::sub(ValueId a, ValueId b) {
    const Tensor& ta = value(a);
    const Tensor& tb = value(b);
    check_same_shape(ta, tb, "sub");
    Tensor y = ta;
    for (int i = 0; i < y.size(); ++i) y[i] -= tb[i];
    Node n;
    n.value = std::move(y);
    n.op = Op::sub;
    n.parents = {a.index, b.index};
    return push(std::move(n));
}

ValueId GradientTape::square(ValueId x) {
    Tensor y = value(x);
    for (double& v : y.data) v = v * v;
    Node n;
    n.value = std::move(y);
    n.op = Op::square;
    n.parents = {x.index};
    return push(std::move(n));
}

ValueId GradientTape::scale(ValueId x, double factor) {
    Tensor y = value(x);
    for (double& v : y.data) v *= factor;
    Node n;
    n.value = std::move(y);
    n.op = Op::scale;
    n.parents = {x.index};
    n.aux = factor;
    return push(std::move(n));
}

ValueId GradientTape::shift(ValueId x, double offset) {
    Tensor y = value(x);
    for (double& v : y.data) v += offset;
    Node n;
    n.value = std::move(y);
    n.op = Op::shift;
    n.parents = {x.index};
    n.aux = offset;
    return push(std::move(n));
}

ValueId GradientTape::sum(const std::vector<ValueId>& terms) {
    if (terms.empty()) throw std::invalid_argument("sum: no terms");
    Tensor y = value(terms[0]);
    Node n;
    n.parents.push_back(terms[0].index);
    for (std::size_t i = 1; i < terms.size(); ++i) {
        const Tensor& t = value(terms[i]);
        check_same_shape(y, t, "sum");
        for (int k = 0; k < y.size(); ++k) y[k] += t[k];
        n.parents.push_back(terms[i].index);
    }
    n.value = std::move(y);
    n.op = Op::sum;
    return push(std::move(n));
}

Tensor& GradientTape::grad_buffer(int index) {
    Tensor& g = grads_[static_cast<std::size_t>(index)];
    if (g.data.empty() && nodes_[static_cast<std::size_t>(index)].value.size() > 0)
        g = Tensor::zeros(nodes_[static_cast<std::size_t>(index)].value.shape);
    return g;
}

void GradientTape::backward(ValueId output) {
    const int out = checked(output);
    if (backward_done_) throw std::logic_error("backward: tape already differentiated");
    if (!nodes_[static_cast<std::size_t>(out)].value.is_scalar())
        throw std::logic_error("backward: output node is not a scalar");
    grads_.assign(nodes_.size(), Tensor{});
    grad_buffer(out)[0] = 1.0;
    for (int i = out; i >= 0; --i) {
        if (grads_[static_cast<std::size_t>(i)].data.empty()) continue;  // not on a path to output
        backprop_node(i);
    }
    backward_done_ = true;
}

void GradientTape::backprop_node(int index) {
    const Node& node = nodes_[static_cast<std::size_t>(index)];
    const Tensor& g = grads_[static_cast<std::size_t>(index)];
    switch (node.op) {
        case Op::leaf:
            break;
        case Op::linear: {
            const Tensor& w = nodes_[static_cast<std::size_t>(node.parents[0])].value;
            const Tensor& x = nodes_[static_cast<std::size_t>(node.parents[2])].value;
            Tensor& gw = grad_buffer(node.parents[0]);
            Tensor& gb = grad_buffer(node.parents[1]);
            Tensor& gx = grad_buffer(node.parents[2]);
            const int out = w.shape[0];
            const int in = w.shape[1];
            for (int r = 0; r < out; ++r) {
                const double gr = g[r];
                gb[r] += gr;
                double* gwrow = gw.data.data() + static_cast<std::size_t>(r) * in;
                const double* wrow = w.data.data() + static_cast<std::size_t>(r) * in;
                for (int c = 0; c < in; ++c) {
                    gwrow[c] += gr * x[c];
                    gx[c] += gr * wrow[c];
                }
            }
            break;
        }
        case Op::relu: {
            const Tensor& x = nodes_[static_cast<std::size_t>(node.parents[0])].value;
            Tensor& gx = grad_buffer(node.parents[0]);
            for (int i = 0; i < x.size(); ++i)
                if (x[i] > 0.0) gx[i] += g[i];
            break;
        }
        case Op::tanh_: {
            const Tensor& y = node.value;
            Tensor& gx = grad_buffer(node.parents[0]);
            for (int i = 0; i < y.size(); ++i) gx[i] += g[i] * (1.0 - y[i] * y[i]);
            break;
        }
        case Op::softmax: {
            const Tensor& p = node.value;
            Tensor& gx = grad_buffer(node.parents[0]);
            double dot = 0.0;
            for (int i = 0; i < p.size(); ++i) dot += g[i] * p[i];
            for (int i = 0; i < p.size(); ++i) gx[i] += p[i] * (g[i] - dot);
            break;
        }
        case Op::cross_entropy: {
            const Tensor& p = nodes_[static_cast<std::size_t>(node.parents[0])].value;
            Tensor& gp = grad_buffer(node.parents[0]);
            const int label = static_cast<int>(node.aux);
            gp[label] += g[0] * (-1.0 / std::max(p[label], prob_floor));
            break;
        }
        case Op::concat: {
            int offset = 0;
            for (int parent : node.parents) {
                Tensor& gp = grad_buffer(parent);
                for (int i = 0; i < gp.size(); ++i) gp[i] += g[offset + i];
                offset += gp.size();
            }
            break;
        }
        case Op::add: {
            Tensor& ga = grad_buffer(node.parents[0]);
            Tensor& gb = grad_buffer(node.parents[1]);
            for (int i = 0; i < g.size(); ++i) {
                ga[i] += g[i];
                gb[i] += g[i];
            }
            break;
        }
        case Op::sub: {
            Tensor& ga = grad_buffer(node.parents[0]);
            Tensor& gb = grad_buffer(node.parents[1]);
            for (int i = 0; i < g.size(); ++i) {
                ga[i] += g[i];
                gb[i] -= g[i];
            }
            break;
        }
        case Op::square: {
            const Tensor& x = nodes_[static_cast<std::size_t>(node.parents[0])].value;
            Tensor& gx = grad_buffer(node.parents[0]);
            for (int i = 0; i < x.size(); ++i) gx[i] += g[i] * 2.0 * x[i];
            break;
        }
        case Op::scale: {
            Tensor& gx = grad_buffer(node.parents[0]);
            for (int i = 0; i < g.size(); ++i) gx[i] += g[i] * node.aux;
            break;
        }
        case Op::shift: {
            Tensor& gx = grad_buffer(node.parents[0]);
            for (int i = 0; i < g.size(); ++i) gx[i] += g[i];
            break;
        }
        case Op::sum: {
            for (int parent : node.parents) {
                Tensor& gp = grad_buffer(parent);
                for (int i = 0; i < g.size(); ++i) gp[i] += g[i];
            }
            break;
        }
    }
}

const Tensor& GradientTape::gradient(ValueId id) const {
    const int i = checked(id);
    if (!backward_done_) throw std::logic_error("gradient: backward has not run");
    const Tensor& g = grads_[static_cast<std::size_t>(i)];
    if (g.data.empty()) {
        // node never reached by backward; materialize a zero once
        const_cast<GradientTape*>(this)->grads_[static_cast<std::size_t>(i)] =
            Tensor::zeros(nodes_[static_cast<std::size_t>(i)].value.shape);
    }
    return grads_[static_cast<std::size_t>(i)];
}

TapeNet put_on_tape(GradientTape& tape, const FeedforwardNet& net, LeafKind kind) {
    TapeNet out;
    out.hidden_activation = net.hidden_activation;
    for (const Tensor& w : net.weights) out.weights.push_back(tape.leaf(w, kind));
    for (const Tensor& b : net.biases) out.biases.push_back(tape.leaf(b, kind));
    return out;
}

ValueId net_forward(GradientTape& tape, const TapeNet& net, ValueId input) {
    ValueId x = input;
    const int layers = static_cast<int>(net.weights.size());
    for (int l = 0; l < layers; ++l) {
        x = tape.linear(net.weights[static_cast<std::size_t>(l)],
                        net.biases[static_cast<std::size_t>(l)], x);
        if (l + 1 < layers) x = tape.activation(x, net.hidden_activation);
    }
    return x;
}

}  // namespace romfac::diffcore
