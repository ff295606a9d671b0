#include "romfac/net.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace romfac::diffcore {

Activation activation_from_name(const std::string& name) {
    if (name == "relu") return Activation::relu;
    if (name == "tanh") return Activation::tanh;
    throw std::invalid_argument("unknown activation: " + name);
}

std::string activation_name(Activation a) {
    return a == Activation::relu ? "relu" : "tanh";
}

int FeedforwardNet::param_count() const {
    int n = 0;
    for_each_param([&n](const Tensor& t) { n += t.size(); });
    return n;
}

static void check_widths(const std::vector<int>& widths) {
    if (widths.size() < 2) throw std::invalid_argument("net needs at least input and output widths");
    for (int w : widths)
        if (w <= 0) throw std::invalid_argument("layer widths must be positive");
}

FeedforwardNet make_net(std::vector<int> widths, Activation act) {
    check_widths(widths);
    FeedforwardNet net;
    net.widths = std::move(widths);
    net.hidden_activation = act;
    for (std::size_t l = 0; l + 1 < net.widths.size(); ++l) {
        net.weights.push_back(Tensor::zeros({net.widths[l + 1], net.widths[l]}));
        net.biases.push_back(Tensor::zeros({net.widths[l + 1]}));
    }
    return net;
}

FeedforwardNet init_net(std::vector<int> widths, Activation act, std::uint64_t seed) {
    FeedforwardNet net = make_net(std::move(widths), act);
    std::mt19937_64 rng(seed);
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        const int fan_in = net.widths[l];
        const int fan_out = net.widths[l + 1];
        const double limit = std::sqrt(6.0 / (fan_in + fan_out));
        std::uniform_real_distribution<double> dist(-limit, limit);
        for (double& w : net.weights[l].data) w = dist(rng);
    }
    return net;
}

Tensor forward(const FeedforwardNet& net, const Tensor& input) {
    if (input.shape.size() != 1 || input.size() != net.input_size())
        throw std::invalid_argument("forward: input shape " + shape_string(input.shape) +
                                    " does not match first layer width " +
                                    std::to_string(net.input_size()));
    std::vector<double> act = input.data;
    for (int l = 0; l < net.layer_count(); ++l) {
        const Tensor& w = net.weights[static_cast<std::size_t>(l)];
        const Tensor& b = net.biases[static_cast<std::size_t>(l)];
        const int out = w.shape[0];
        const int in = w.shape[1];
        std::vector<double> next(static_cast<std::size_t>(out));
        for (int r = 0; r < out; ++r) {
            double acc = b[r];
            const double* row = w.data.data() + static_cast<std::size_t>(r) * in;
            for (int c = 0; c < in; ++c) acc += row[c] * act[static_cast<std::size_t>(c)];
            next[static_cast<std::size_t>(r)] = acc;
        }
        if (l + 1 < net.layer_count()) {
            if (net.hidden_activation == Activation::relu) {
                for (double& v : next) v = v > 0.0 ? v : 0.0;
            } else {
                for (double& v : next) v = std::tanh(v);
            }
        }
        act = std::move(next);
    }
    return Tensor::vector(std::move(act));
}

Tensor softmax(const Tensor& logits) {
    if (logits.size() == 0) throw std::domain_error("softmax: empty input");
    if (!logits.all_finite()) throw std::domain_error("softmax: non-finite input");
    const double mx = *std::max_element(logits.data.begin(), logits.data.end());
    Tensor out = Tensor::zeros(logits.shape);
    double total = 0.0;
    for (int i = 0; i < logits.size(); ++i) {
        out[i] = std::exp(logits[i] - mx);
        total += out[i];
    }
    for (int i = 0; i < out.size(); ++i) out[i] /= total;
    return out;
}

double cross_entropy(const Tensor& probs, int label) {
    if (label < 0 || label >= probs.size())
        throw std::invalid_argument("cross_entropy: label out of range");
    return -std::log(std::max(probs[label], prob_floor));
}

namespace {

constexpr char net_magic[8] = {'R', 'O', 'M', 'F', 'N', 'E', 'T', '\0'};
constexpr std::uint32_t net_format_version = 1;

void write_u32(std::ostream& out, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t read_u32(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (!in) throw std::runtime_error("net load: truncated header");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}

void write_f64(std::ostream& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<const char*>(b), 8);
}

double read_f64(std::istream& in) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    if (!in) throw std::runtime_error("net load: truncated values");
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

}  // namespace

void save_net(std::ostream& out, const FeedforwardNet& net) {
    out.write(net_magic, sizeof(net_magic));
    write_u32(out, net_format_version);
    write_u32(out, static_cast<std::uint32_t>(net.widths.size()));
    for (int w : net.widths) write_u32(out, static_cast<std::uint32_t>(w));
    net.for_each_param([&out](const Tensor& t) {
        for (double v : t.data) write_f64(out, v);
    });
    if (!out) throw std::runtime_error("net save: write failure");
}

FeedforwardNet load_net(std::istream& in, Activation act) {
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, net_magic, sizeof(net_magic)) != 0)
        throw std::runtime_error("net load: bad magic");
    const std::uint32_t version = read_u32(in);
    if (version != net_format_version)
        throw std::runtime_error("net load: unsupported format version " + std::to_string(version));
    const std::uint32_t n = read_u32(in);
    if (n < 2 || n > 64) throw std::runtime_error("net load: implausible width count");
    std::vector<int> widths(n);
    for (auto& w : widths) w = static_cast<int>(read_u32(in));
    FeedforwardNet net = make_net(std::move(widths), act);
    net.for_each_param([&in](Tensor& t) {
        for (double& v : t.data) v = read_f64(in);
    });
    return net;
}

}  // namespace romfac::diffcore
