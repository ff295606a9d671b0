#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <vector>

#include "romfac/tensor.hpp"

namespace romfac::diffcore {

enum class Activation { relu, tanh };

Activation activation_from_name(const std::string& name);
std::string activation_name(Activation a);

// Fully connected net: widths {in, h1, ..., out}, weights[l] is
// [widths[l+1] x widths[l]], hidden activation between layers, raw
// logits out. Parameter count is fixed at construction.
struct FeedforwardNet {
    std::vector<int> widths;
    Activation hidden_activation = Activation::relu;
    std::vector<Tensor> weights;
    std::vector<Tensor> biases;

    int input_size() const { return widths.front(); }
    int output_size() const { return widths.back(); }
    int layer_count() const { return static_cast<int>(weights.size()); }
    int param_count() const;

    template <typename Fn>
    void for_each_param(Fn&& fn) {
        for (auto& w : weights) fn(w);
        for (auto& b : biases) fn(b);
    }
    template <typename Fn>
    void for_each_param(Fn&& fn) const {
        for (const auto& w : weights) fn(w);
        for (const auto& b : biases) fn(b);
    }
};

FeedforwardNet make_net(std::vector<int> widths, Activation act);

// Xavier-uniform weights, zero biases.
FeedforwardNet init_net(std::vector<int> widths, Activation act, std::uint64_t seed);

// Logits of the last layer; throws std::invalid_argument on a shape mismatch.
Tensor forward(const FeedforwardNet& net, const Tensor& input);

// Numerically stable; output sums to 1. Throws std::domain_error on
// non-finite or empty input.
Tensor softmax(const Tensor& logits);

// -log(probs[label]), probability floored at prob_floor so the result
// stays finite.
inline constexpr double prob_floor = 1e-12;
double cross_entropy(const Tensor& probs, int label);

// Flat binary parameter layout: magic, version, widths, then raw
// little-endian doubles in layer order (all weights, then all biases).
void save_net(std::ostream& out, const FeedforwardNet& net);
FeedforwardNet load_net(std::istream& in, Activation act);

}  // namespace romfac::diffcore
